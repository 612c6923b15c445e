#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "s3conf/types.hpp"

namespace s3conf {

inline constexpr int kDefaultMaxExactness = 64;

// Product rule on S^3 in hyperspherical angles (psi, theta, phi):
//   omega = (cos psi, sin psi cos theta, sin psi sin theta cos phi,
//            sin psi sin theta sin phi),
// with Gauss-Chebyshev (second kind) nodes in cos psi, Gauss-Legendre in
// cos theta and the trapezoid rule in phi. Integrates every polynomial of
// total degree <= exactness exactly.
class QuadratureGrid {
 public:
  // Throws ConfigError when exactness is outside [2, max_exactness].
  static std::shared_ptr<const QuadratureGrid> build(
      int exactness, int max_exactness = kDefaultMaxExactness);

  int exactness() const { return exactness_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Vec4>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const Vec4& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Shell counts (n_psi, n_theta, n_phi); node index is
  // (i_psi * n_theta + i_theta) * n_phi + i_phi.
  std::array<int, 3> shape() const { return shape_; }
  std::size_t index(int i_psi, int i_theta, int i_phi) const {
    return (static_cast<std::size_t>(i_psi) * shape_[1] + i_theta) * shape_[2] + i_phi;
  }

  // sum_i w_i values_i with compensated summation. Throws ContractViolation
  // on length mismatch and NumericError on a non-finite entry.
  double integrate(std::span<const double> values) const;

 private:
  QuadratureGrid() = default;

  int exactness_ = 0;
  std::array<int, 3> shape_{};
  std::vector<Vec4> nodes_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

// Compensated (Neumaier) accumulator; summation order is the call order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// One-dimensional rules, exposed for tests.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule1D gauss_legendre(int n);
// Nodes/weights for int_{-1}^{1} f(x) sqrt(1 - x^2) dx.
Rule1D gauss_chebyshev_second_kind(int n);

}  // namespace s3conf
