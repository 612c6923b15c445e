#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "s3conf/errors.hpp"
#include "s3conf/functionals.hpp"
#include "s3conf/moebius.hpp"

using namespace s3conf;

namespace {

Coefficients one_plus(int L, int l, int k, double eps) {
  Coefficients c(L);
  c(0, 0) = std::sqrt(oracle::kArea);
  c(l, k) += eps;
  return c;
}

Coefficients random_field(int L, unsigned seed, double a) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  Coefficients c(L);
  c(0, 0) = std::sqrt(oracle::kArea);
  for (int l = 1; l <= L; ++l)
    for (int k = 0; k < (l + 1) * (l + 1); ++k) c(l, k) = a * n(rng) / ((1 + l) * (1 + l));
  return c;
}

}  // namespace

TEST_CASE("closed-form constants") {
  CHECK(f1_round() == doctest::Approx(oracle::f1_round()).epsilon(1e-15));
  CHECK(f2_round() == doctest::Approx(oracle::f2_round()).epsilon(1e-15));
  CHECK(f1_round() * f1_round() == doctest::Approx(3 * f2_round()).epsilon(1e-14));
  const auto b = HarmonicBasis::build(0, QuadratureGrid::build(8));
  const auto v = F2(ScalarField::constant(b, 1.0));
  CHECK(v.F1_of_w == doctest::Approx(oracle::f1_round()).epsilon(1e-12));
  CHECK(v.F2_of_u == doctest::Approx(oracle::f2_round()).epsilon(1e-12));
  CHECK(v.F2_of_u == doctest::Approx(40.0099).epsilon(1e-5));
  CHECK(v.sigma1_min == doctest::Approx(3.0 / 32));
  CHECK(v.E2 == doctest::Approx(0.75 * oracle::kArea));
}

TEST_CASE("sigma_1 of 1 + a w1 by hand") {
  const auto grid = QuadratureGrid::build(8);
  const auto b = HarmonicBasis::build(1, grid);
  const double a = 0.2;
  Coefficients c(1);
  c(0, 0) = std::sqrt(oracle::kArea);
  // Y_{1,0} is proportional to w1; find the scale from the grid.
  Coefficients y(1);
  y(1, 0) = 1;
  const auto yf = ScalarField::from_coefficients(b, y);
  std::size_t top = 0;
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (grid->node(i)[0] > grid->node(top)[0]) top = i;
  const double s = yf.value(top) / grid->node(top)[0];
  c(1, 0) = a / s;
  const auto u = ScalarField::from_coefficients(b, c);
  const auto sig = sigma1(u);
  const auto dens = e2_density(u);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->node(i)[0];
    const double uu = 1 + a * x, lap = -3 * a * x, g2 = a * a * (1 - x * x);
    const double expect = 0.25 * uu * lap - 0.75 * g2 + 3.0 / 32 * uu * uu;
    CHECK(sig[i] == doctest::Approx(expect).epsilon(1e-12));
    const double f = 64 * (expect + 0.5 * g2 + uu * uu / 32) * g2;
    CHECK(dens.e2[i] == doctest::Approx(0.75 * std::pow(uu, 4) - f).epsilon(1e-12));
  }
}

TEST_CASE("sigma_1: product-rule form agrees with the spectral form") {
  const int L = 4;
  const auto grid = QuadratureGrid::build(4 * L + 2);
  const auto b = HarmonicBasis::build(L, grid);
  const auto b2 = HarmonicBasis::build(2 * L, grid);
  const auto u = ScalarField::from_coefficients(b, random_field(L, 3, 0.3));
  const auto s1 = sigma1(u);
  const auto s2 = sigma1_spectral(u, *b2);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(std::abs(s1[i] - s2[i]) < 1e-11);
}

TEST_CASE("conformal invariance and 0-homogeneity") {
  const int L = 3;
  const auto grid = QuadratureGrid::build(64);
  const auto b = HarmonicBasis::build(L, grid);
  const auto u = ScalarField::from_coefficients(b, random_field(L, 7, 0.05));
  const auto v0 = F2(u);
  const MoebiusParam psi(Vec4(0.2, -0.1, 0.3, 0.1));
  const auto v1 = F2(act(u, psi, 4.0));
  CHECK(v1.F2_of_u == doctest::Approx(v0.F2_of_u).epsilon(1e-8));
  CHECK(v1.F1_of_w == doctest::Approx(v0.F1_of_w).epsilon(1e-8));
  const auto v2 = F2(scale(u, 3.7));
  CHECK(v2.F2_of_u == doctest::Approx(v0.F2_of_u).epsilon(1e-13));
  CHECK(v2.F1_of_w == doctest::Approx(v0.F1_of_w).epsilon(1e-13));
  CHECK(F1(pow(u, -2.0)) == doctest::Approx(v0.F1_of_w).epsilon(1e-13));
}

TEST_CASE("inequalities on random feasible fields") {
  const int L = 4;
  const auto b = HarmonicBasis::build(L, QuadratureGrid::build(4 * L + 4));
  int checked = 0;
  for (unsigned seed = 0; seed < 30; ++seed) {
    const auto u = ScalarField::from_coefficients(b, random_field(L, seed, 0.08));
    const auto v = F2(u);
    if (!v.feasible()) continue;
    ++checked;
    CHECK(v.F1_of_w >= f1_round() - 1e-8);
    CHECK(v.F2_of_u <= f2_round() + 1e-8);
    for (double t : {0.0, 0.5, 1.0, 3.0}) {
      CHECK(deficit_from_values(v, t) >= -1e-8 * deficit_scale(t));
      CHECK(deficit(u, t) == doctest::Approx(deficit_from_values(v, t)));
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("second-order expansion along mean-zero directions") {
  // F2[1] - F2[1 + eps Y_l] = (eps^2 / 2) 16 |S^3|^{1/3} (l(l+2) - 3) + O(eps^4).
  const double eps = 1e-3;
  for (int l : {2, 3}) {
    const auto b = HarmonicBasis::build(l, QuadratureGrid::build(4 * l + 8));
    const double f2_one = F2(ScalarField::constant(b, 1.0)).F2_of_u;
    const double d = f2_one - F2(ScalarField::from_coefficients(b, one_plus(l, l, 1, eps))).F2_of_u;
    const double expect = 0.5 * eps * eps * 16 * std::cbrt(oracle::kArea) * (l * (l + 2.0) - 3);
    CHECK(d == doctest::Approx(expect).epsilon(1e-4));
  }
}

TEST_CASE("Hessian form") {
  const auto b = HarmonicBasis::build(3, QuadratureGrid::build(8));
  for (int l = 0; l <= 3; ++l) {
    Coefficients c(3);
    c(l, 0) = 1;
    const double q = hessian_form(ScalarField::from_coefficients(b, c));
    CHECK(q == doctest::Approx(8 * (l * (l + 2.0) - 3)).epsilon(1e-12));
    CHECK(hessian_form_spectral(c) == doctest::Approx(q).epsilon(1e-12));
  }
}

TEST_CASE("W14-L4 diagnostic") {
  const auto b = HarmonicBasis::build(2, QuadratureGrid::build(12));
  const auto d = w14_l4_diagnostic(ScalarField::constant(b, 1.0));
  CHECK(d.lhs == 0);
  CHECK(d.rhs == doctest::Approx(3.0 / 128 * oracle::kArea));
  CHECK(d.pass);
  const auto far = w14_l4_diagnostic(ScalarField::from_coefficients(b, one_plus(2, 2, 0, 3.0)));
  CHECK_FALSE(far.pass);
}

TEST_CASE("domain and feasibility errors") {
  const auto b = HarmonicBasis::build(2, QuadratureGrid::build(8));
  Coefficients y(2);
  y(2, 0) = 1;
  CHECK_THROWS_AS(F2(ScalarField::from_coefficients(b, y)), DomainError);
  const auto bad = ScalarField::from_coefficients(b, one_plus(2, 2, 0, 0.4));
  const auto v = F2(bad);
  CHECK_FALSE(v.feasible());
  CHECK_THROWS_AS(require_feasible(v), FeasibilityError);
  CHECK_THROWS_AS(deficit(bad, 1.0), FeasibilityError);
  try {
    require_feasible(v);
  } catch (const FeasibilityError& e) {
    CHECK(e.constraint().find("sigma_1") != std::string::npos);
    CHECK(e.node() == v.sigma1_argmin);
  }
  PointSamples s;
  s.values.assign(b->grid()->size(), 1.0);
  s.gradients.assign(b->grid()->size(), Vec4::Zero());
  CHECK_THROWS_AS(sigma1(ScalarField::from_samples(b->grid(), s)), ContractViolation);
  CHECK_THROWS_AS(deficit(ScalarField::constant(b, 1.0), -1.0), ContractViolation);
}
