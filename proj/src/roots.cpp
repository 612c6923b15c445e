#include "s3conf/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "s3conf/errors.hpp"

namespace s3conf {

namespace {

std::vector<double> quadratic_roots(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  // Stable form avoiding cancellation.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> r;
  if (q != 0.0) {
    r.push_back(q / a);
    r.push_back(c / q);
  } else {
    r.push_back(0.0);
  }
  return r;
}

}  // namespace

std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
  const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0) return {};
  if (std::abs(c3) <= 1e-14 * scale) return quadratic_roots(c2, c1, c0);

  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;
  // x = t - a/3 gives t^3 + p t + q = 0.
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;

  std::vector<double> roots;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (p < 0.0 && disc <= 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift);
    }
  } else {
    const double s = std::sqrt(std::max(disc, 0.0));
    const double t = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
    roots.push_back(t + shift);
  }

  for (double& x : roots) {
    for (int it = 0; it < 3; ++it) {
      const double f = ((x + a) * x + b) * x + c;
      const double df = (3.0 * x + 2.0 * a) * x + b;
      if (df == 0.0) break;
      const double step = f / df;
      if (!std::isfinite(step)) break;
      x -= step;
    }
  }
  return roots;
}

QuarticMinimum minimize_quartic(const Quartic& q) {
  const auto& c = q.c;
  std::vector<double> candidates = real_cubic_roots(4.0 * c[4], 3.0 * c[3], 2.0 * c[2], c[1]);
  QuarticMinimum best;
  if (candidates.empty()) {
    // Constant derivative zero: polynomial is constant.
    best.argmin = 0.0;
    best.value = q(0.0);
    return best;
  }
  best.value = std::numeric_limits<double>::infinity();
  for (double x : candidates) {
    const double v = q(x);
    if (v < best.value) {
      best.value = v;
      best.argmin = x;
    }
  }
  return best;
}

}  // namespace s3conf
