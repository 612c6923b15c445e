#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <vector>

#include "s3conf/field.hpp"
#include "s3conf/moebius.hpp"
#include "s3conf/nelder_mead.hpp"
#include "s3conf/roots.hpp"

namespace s3conf {

// Moments of v entering p(lambda) = ||lambda v - 1||_{W^{1,2}}^2 + ||lambda v - 1||_{W^{1,4}}^4.
struct DistanceMoments {
  double area = 0;  // int 1
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;  // int v^k
  double g2 = 0, g4 = 0;                  // int |grad v|^2, int |grad v|^4
};
DistanceMoments distance_moments(const ScalarField& v);
Quartic distance_polynomial(const DistanceMoments& m);

struct LambdaSolution {
  double lambda = 0;
  double value = 0;
};
// Exact minimization over lambda (closed-form cubic for p'(lambda) = 0).
LambdaSolution lambda_minimize(const ScalarField& v);
LambdaSolution lambda_minimize(const DistanceMoments& m);

struct DistOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  double tol = 1e-8;         // simplex diameter in chart coordinates
  double stall_tol = 1e-12;  // objective stall across stall_window iterations
  int stall_window = 20;
  int max_iter = 2000;
  double initial_step = 0.2;
  double offset_scale = 0.2;  // spread of restart starting points in the chart
  double guard_radius = 0.995;
  int max_exactness = kDefaultMaxExactness;
  int jobs = 1;
};

struct RestartTrace {
  double best_value = 0;
  Vec4 xi = Vec4::Zero();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

struct DistWitness {
  double value = 0;
  double lambda_star = 0;
  Vec4 xi_star = Vec4::Zero();
  ScalarField remainder;  // lambda* (u)_{Psi_xi*} - 1
  double w12_part = 0;    // ||r||_{W^{1,2}}
  double w14_part = 0;    // ||r||_{W^{1,4}}
  std::vector<RestartTrace> trace;
  bool converged = false;
  bool guard_triggered = false;
};

// Chart R^4 -> B_1(0): xi = tanh(|rho|) rho / |rho|.
Vec4 chart_to_ball(std::span<const double> rho);

// Objective at a fixed xi: min over lambda, evaluated on u's grid (or on a
// finer grid when |xi| exceeds the guard radius).
class DistanceObjective {
 public:
  DistanceObjective(ScalarField u, DistOptions options);
  LambdaSolution at(const Vec4& xi) const;
  bool guard_used() const { return guard_used_; }
  const ScalarField& field() const { return u_; }
  // u on its own grid, or on the doubled-exactness grid beyond the guard.
  const ScalarField& sampling_field(const Vec4& xi) const;

 private:
  ScalarField u_;
  DistOptions options_;
  mutable std::mutex fine_mutex_;
  mutable std::optional<ScalarField> fine_;
  mutable std::atomic<bool> guard_used_{false};
};

// dist(u) = inf over lambda and xi (rotations omitted: the target 1 and all
// norms are rotation invariant). Requires an evaluable, strictly positive u.
DistWitness dist(const ScalarField& u, const DistOptions& options = {});

struct OrthogonalityReport {
  double c0 = 0;  // |int r| / ||r||_2^2
  double c1 = 0;  // max_i |int w_i r| / ||r||_{W^{1,2}}^2
};
OrthogonalityReport orthogonality_report(const ScalarField& r);

struct FrequencySplit {
  Coefficients lo;   // degrees {0, 1}
  Coefficients med;  // degrees {2..L_cut}
  Coefficients hi;   // degrees {L_cut+1..L}
  bool hi_empty = false;  // L_cut >= band limit
};
// Throws ConfigError for L_cut < 2.
FrequencySplit frequency_split(const Coefficients& r, int l_cut);

}  // namespace s3conf
