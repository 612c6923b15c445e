#include "s3conf/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "s3conf/errors.hpp"

namespace s3conf {

namespace {

// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

Rule1D gauss_legendre(int n) {
  Rule1D rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  if (n == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Rule1D gauss_chebyshev_second_kind(int n) {
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double h = std::numbers::pi / (n + 1);
  for (int i = 0; i < n; ++i) {
    // Ascending in x.
    const double t = (n - i) * h;
    const double s = std::sin(t);
    rule.nodes[i] = std::cos(t);
    rule.weights[i] = h * s * s;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::shared_ptr<const QuadratureGrid> QuadratureGrid::build(int exactness, int max_exactness) {
  if (exactness < 2 || exactness > max_exactness) {
    throw ConfigError("grid exactness " + std::to_string(exactness) + " outside [2, " +
                      std::to_string(max_exactness) + "]");
  }
  const int n_psi = (exactness + 2) / 2;  // ceil((D + 1) / 2)
  const int n_theta = n_psi;
  const int n_phi = exactness + 1;

  const Rule1D psi_rule = gauss_chebyshev_second_kind(n_psi);
  const Rule1D theta_rule = gauss_legendre(n_theta);

  auto grid = std::shared_ptr<QuadratureGrid>(new QuadratureGrid());
  grid->exactness_ = exactness;
  grid->shape_ = {n_psi, n_theta, n_phi};
  const std::size_t total = static_cast<std::size_t>(n_psi) * n_theta * n_phi;
  grid->nodes_.reserve(total);
  grid->weights_.reserve(total);

  const double phi_weight = 2.0 * std::numbers::pi / n_phi;
  for (int a = 0; a < n_psi; ++a) {
    const double cpsi = psi_rule.nodes[a];
    const double spsi = std::sqrt(std::max(0.0, 1.0 - cpsi * cpsi));
    for (int b = 0; b < n_theta; ++b) {
      const double cth = theta_rule.nodes[b];
      const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
      for (int c = 0; c < n_phi; ++c) {
        const double phi = phi_weight * c;
        Vec4 w(cpsi, spsi * cth, spsi * sth * std::cos(phi), spsi * sth * std::sin(phi));
        w.normalize();
        grid->nodes_.push_back(w);
        grid->weights_.push_back(psi_rule.weights[a] * theta_rule.weights[b] * phi_weight);
      }
    }
  }
  return grid;
}

double QuadratureGrid::integrate(std::span<const double> values) const {
  if (values.size() != weights_.size()) {
    throw ContractViolation("integrate: " + std::to_string(values.size()) +
                            " values for a grid of " + std::to_string(weights_.size()) + " nodes");
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw NumericError("integrate: non-finite integrand", i);
    acc.add(weights_[i] * values[i]);
  }
  return acc.value();
}

}  // namespace s3conf
