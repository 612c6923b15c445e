#pragma once

#include <array>
#include <vector>

namespace s3conf {

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 in closed form (trigonometric /
// Cardano), each polished by Newton steps. Falls back to the quadratic or
// linear case when leading coefficients vanish. An identically zero
// polynomial has no isolated roots and returns an empty list.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0);

// c[0] + c[1] x + ... + c[4] x^4.
struct Quartic {
  std::array<double, 5> c{};

  double operator()(double x) const {
    return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
  }
  double derivative(double x) const {
    return ((4.0 * c[4] * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1];
  }
};

struct QuarticMinimum {
  double argmin = 0;
  double value = 0;
};

// Global minimum of a quartic that is bounded below (c4 > 0, or lower
// degree with a positive leading term). Evaluates every real critical
// point. A constant polynomial reports argmin 0.
QuarticMinimum minimize_quartic(const Quartic& q);

}  // namespace s3conf
