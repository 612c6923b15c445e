#pragma once

#include <functional>
#include <span>
#include <vector>

namespace s3conf {

struct NelderMeadOptions {
  double initial_step = 0.2;
  // Converged when the simplex diameter drops below this...
  double diameter_tol = 1e-8;
  // ...or the best value improves by less than stall_tol over stall_window
  // consecutive iterations.
  double stall_tol = 1e-12;
  int stall_window = 20;
  int max_iter = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Downhill simplex with the standard coefficients (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2). Deterministic for a given start.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace s3conf
