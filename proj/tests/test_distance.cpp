#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "s3conf/distance.hpp"
#include "s3conf/errors.hpp"
#include "s3conf/nelder_mead.hpp"
#include "s3conf/parallel.hpp"
#include "s3conf/roots.hpp"

using namespace s3conf;

namespace {

Coefficients random_field(int L, unsigned seed, double a) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  Coefficients c(L);
  c(0, 0) = std::sqrt(oracle::kArea);
  for (int l = 1; l <= L; ++l)
    for (int k = 0; k < (l + 1) * (l + 1); ++k) c(l, k) = a * n(rng) / ((1 + l) * (1 + l));
  return c;
}

// p(lambda) straight from the definition.
double p_direct(const ScalarField& v, double lambda) {
  const auto& g = *v.grid();
  std::vector<double> a(v.size()), b(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = lambda * v.value(i) - 1;
    const double gr = lambda * lambda * v.gradient(i).squaredNorm();
    a[i] = gr + r * r;
    b[i] = gr * gr + std::pow(r, 4);
  }
  return g.integrate(a) + g.integrate(b);
}

}  // namespace

TEST_CASE("cubic roots") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 200; ++t) {
    const double r1 = u(rng), r2 = u(rng), r3 = u(rng), s = u(rng) + 4;
    // s (x - r1)(x - r2)(x - r3)
    const auto roots = real_cubic_roots(s, -s * (r1 + r2 + r3), s * (r1 * r2 + r1 * r3 + r2 * r3),
                                        -s * r1 * r2 * r3);
    for (double r : {r1, r2, r3}) {
      double best = 1e9;
      for (double x : roots) best = std::min(best, std::abs(x - r));
      CHECK(best < 1e-6);
    }
  }
  CHECK(real_cubic_roots(0, 1, -3, 2).size() == 2);
  CHECK(real_cubic_roots(0, 0, 2, -1).at(0) == doctest::Approx(0.5));
  CHECK(real_cubic_roots(0, 0, 0, 0).empty());
  CHECK(real_cubic_roots(1, 0, 1, 0).size() == 1);
}

TEST_CASE("quartic minimum against a dense scan") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 50; ++t) {
    Quartic q;
    for (int i = 0; i < 4; ++i) q.c[i] = u(rng);
    q.c[4] = std::abs(u(rng)) + 0.1;
    const auto m = minimize_quartic(q);
    double scan = 1e300;
    for (int i = 0; i <= 200000; ++i) scan = std::min(scan, q(-10 + 20.0 * i / 200000));
    CHECK(m.value <= scan + 1e-12);
    CHECK(m.value == doctest::Approx(q(m.argmin)));
  }
}

TEST_CASE("inner lambda solve is optimal") {
  const int L = 3;
  const auto b = HarmonicBasis::build(L, QuadratureGrid::build(4 * L + 4));
  for (unsigned seed = 0; seed < 100; ++seed) {
    const auto v = ScalarField::from_coefficients(b, random_field(L, seed, 0.5 + 0.05 * seed));
    const auto sol = lambda_minimize(v);
    const double p0 = p_direct(v, sol.lambda);
    CHECK(sol.value == doctest::Approx(p0).epsilon(1e-10));
    CHECK(p0 <= p_direct(v, sol.lambda + 1e-4));
    CHECK(p0 <= p_direct(v, sol.lambda - 1e-4));
    if (seed % 10 == 0) {
      const Quartic q = distance_polynomial(distance_moments(v));
      double scan = 1e300;
      for (int i = 0; i <= 10000; ++i) scan = std::min(scan, q(-10 + 20.0 * i / 10000));
      CHECK(sol.value <= scan + 1e-12);
    }
  }
}

TEST_CASE("Nelder-Mead on a shifted quadratic") {
  const auto r = nelder_mead(
      [](std::span<const double> x) {
        return std::pow(x[0] - 1, 2) + 3 * std::pow(x[1] + 2, 2) + std::pow(x[2], 2);
      },
      {0, 0, 0});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-2).epsilon(1e-6));
  CHECK(r.value < 1e-10);
}

TEST_CASE("chart maps onto the open ball") {
  for (double s : {0.0, 0.1, 1.0, 5.0, 30.0}) {
    const std::vector<double> rho{s, -s, 0.5 * s, 0};
    const Vec4 xi = chart_to_ball(rho);
    CHECK(xi.norm() <= 1);
    if (s > 0 && s < 5) CHECK(xi.norm() < 1);
  }
  CHECK(chart_to_ball(std::vector<double>{0, 0, 0, 0}).norm() == 0);
}

TEST_CASE("dist: zero on the orbit of 1") {
  const auto b = HarmonicBasis::build(1, QuadratureGrid::build(16));
  CHECK(dist(ScalarField::constant(b, 1.0)).value < 1e-14);
  const auto u = scale(act(ScalarField::constant(b, 1.0), MoebiusParam(Vec4(0, 0.3, 0, 0)), 4.0), 2.0);
  const auto w = dist(u);
  CHECK(w.value < 1e-6);
  CHECK(w.lambda_star == doctest::Approx(0.5).epsilon(1e-4));
  CHECK((w.xi_star + Vec4(0, 0.3, 0, 0)).norm() < 1e-4);
  CHECK(w.converged);
  CHECK(w.trace.size() == 8);
}

TEST_CASE("dist of 1 + eps Y2 is (1 + 8) eps^2 to leading order") {
  const auto b = HarmonicBasis::build(2, QuadratureGrid::build(12));
  Coefficients c(2);
  c(0, 0) = std::sqrt(oracle::kArea);
  const double eps = 1e-2;
  c(2, 4) = eps;
  const auto w = dist(ScalarField::from_coefficients(b, c));
  CHECK(w.value == doctest::Approx(9 * eps * eps).epsilon(1e-3));
  CHECK(w.value == doctest::Approx(w.w12_part * w.w12_part + std::pow(w.w14_part, 4)).epsilon(1e-12));
}

TEST_CASE("dist: rotation invariance and monotone in restarts") {
  const int L = 2;
  const auto b = HarmonicBasis::build(L, QuadratureGrid::build(4 * L + 4));
  const auto u = ScalarField::from_coefficients(b, random_field(L, 5, 0.1));
  Eigen::HouseholderQR<Mat4> qr(Mat4::Random());
  const Mat4 rot = qr.householderQ();
  const auto rotated = act(u, MoebiusParam(Vec4::Zero(), rot), 4.0);
  DistOptions few;
  few.restarts = 3;
  const double d8 = dist(u).value;
  CHECK(dist(rotated).value == doctest::Approx(d8).epsilon(1e-6));
  CHECK(dist(u, few).value >= d8);
}

TEST_CASE("orthogonality report") {
  const auto g = QuadratureGrid::build(8);
  const auto b = HarmonicBasis::build(2, g);
  Coefficients y2(2);
  y2(2, 0) = 1e-2;
  const auto r2 = orthogonality_report(ScalarField::from_coefficients(b, y2));
  CHECK(r2.c0 < 1e-10);
  double prev = 0;
  for (double eps : {1e-2, 5e-3}) {
    Coefficients y1(2);
    y1(1, 0) = eps;
    const auto r1 = orthogonality_report(ScalarField::from_coefficients(b, y1));
    CHECK(r1.c1 > 0);
    if (prev > 0) CHECK(r1.c1 == doctest::Approx(2 * prev).epsilon(1e-10));
    prev = r1.c1;
  }
  CHECK(orthogonality_report(ScalarField::constant(g, 0.0)).c0 == 0);
}

TEST_CASE("frequency split") {
  Coefficients r(7);
  r(3, 2) = 1;
  auto s = frequency_split(r, 5);
  CHECK(s.med(3, 2) == 1);
  CHECK(s.lo.values().norm() == 0);
  CHECK(s.hi.values().norm() == 0);
  Coefficients r2(7);
  r2(1, 1) = 2;
  r2(7, 5) = 3;
  s = frequency_split(r2, 5);
  CHECK(s.lo(1, 1) == 2);
  CHECK(s.hi(7, 5) == 3);
  CHECK(s.med.values().norm() == 0);
  CHECK_FALSE(s.hi_empty);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  for (Eigen::Index i = 0; i < r.values().size(); ++i) r.values()[i] = n(rng);
  s = frequency_split(r, 4);
  CHECK(s.lo.values().squaredNorm() + s.med.values().squaredNorm() + s.hi.values().squaredNorm() ==
        doctest::Approx(r.values().squaredNorm()).epsilon(1e-12));
  CHECK(((s.lo + s.med + s.hi).values() - r.values()).norm() == 0);
  CHECK(frequency_split(r, 9).hi_empty);
  CHECK_THROWS_AS(frequency_split(r, 1), ConfigError);
}

TEST_CASE("parallel_for: deterministic slots, lowest-index exception") {
  std::vector<int> out(100);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
}
