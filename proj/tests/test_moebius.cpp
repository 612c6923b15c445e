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

std::mt19937_64 rng(42);

Vec4 random_unit() {
  std::normal_distribution<double> n(0, 1);
  return Vec4(n(rng), n(rng), n(rng), n(rng)).normalized();
}

Mat4 random_rotation() {
  std::normal_distribution<double> n(0, 1);
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = n(rng);
  Eigen::HouseholderQR<Mat4> qr(m);
  return qr.householderQ();
}

// Orthonormal basis of the tangent space at w.
std::array<Vec4, 3> tangent_frame(const Vec4& w) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity() - w * w.transpose();
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(m, Eigen::ComputeFullU);
  return {svd.matrixU().col(0), svd.matrixU().col(1), svd.matrixU().col(2)};
}

}  // namespace

TEST_CASE("maps the sphere to itself; identity and inverse") {
  const MoebiusParam psi(Vec4(0.2, -0.3, 0.1, 0.4), random_rotation());
  const MoebiusParam inv = psi.inverse();
  for (int i = 0; i < 20; ++i) {
    const Vec4 w = random_unit();
    const Vec4 y = moebius_apply(psi, w);
    CHECK(std::abs(y.norm() - 1) < 1e-15);
    CHECK((moebius_apply(inv, y) - w).norm() < 1e-13);
    CHECK((moebius_apply(MoebiusParam::identity(), w) - w).norm() < 1e-15);
  }
  // The two points on the xi axis are fixed.
  const MoebiusParam p2(Vec4(0.5, 0, 0, 0));
  CHECK((moebius_apply(p2, Vec4(1, 0, 0, 0)) - Vec4(1, 0, 0, 0)).norm() < 1e-15);
  CHECK((moebius_apply(p2, Vec4(-1, 0, 0, 0)) - Vec4(-1, 0, 0, 0)).norm() < 1e-15);
}

TEST_CASE("conformal factor equals the numerical stretch") {
  // |dPsi(t)| = k |t| for every tangent t, so J = k^3.
  const MoebiusParam psi(Vec4(0.1, 0.5, -0.2, 0.3), random_rotation());
  const double h = 1e-6;
  for (int i = 0; i < 10; ++i) {
    const Vec4 w = random_unit();
    const double k = conformal_factor(psi, w);
    Eigen::Matrix3d gram;
    const auto frame = tangent_frame(w);
    std::array<Vec4, 3> d;
    for (int a = 0; a < 3; ++a) {
      const Vec4 wp = w * std::cos(h) + frame[a] * std::sin(h);
      const Vec4 wm = w * std::cos(h) - frame[a] * std::sin(h);
      d[a] = (moebius_apply(psi, wp) - moebius_apply(psi, wm)) / (2 * h);
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) gram(a, b) = d[a].dot(d[b]);
    CHECK((gram - k * k * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-7 * k * k);
    CHECK(std::sqrt(gram.determinant()) == doctest::Approx(std::pow(k, 3)).epsilon(1e-7));
  }
}

TEST_CASE("composition") {
  const MoebiusParam a(Vec4(0.3, 0.1, 0, -0.2), random_rotation());
  const MoebiusParam b(Vec4(-0.1, 0.4, 0.2, 0.1));
  const MoebiusParam ab = compose(a, b);
  for (int i = 0; i < 20; ++i) {
    const Vec4 w = random_unit();
    CHECK((moebius_apply(ab, w) - moebius_apply(a, moebius_apply(b, w))).norm() < 1e-13);
  }
}

TEST_CASE("action exponents") {
  CHECK(action_exponent(2) == doctest::Approx(1.0 / 6));
  CHECK(action_exponent(4) == doctest::Approx(-1.0 / 12));
  CHECK_THROWS_AS(action_exponent(0), ContractViolation);
}

TEST_CASE("pullback of 1: L4 closed form and the Yamabe equation") {
  const auto grid = QuadratureGrid::build(64);
  const auto one = ScalarField::constant(grid, 1.0);
  for (double r : {0.3, 0.6}) {
    const MoebiusParam psi(r * Vec4(0, 0, 1, 0));
    const ScalarField u = act(one, psi, 4.0);
    CHECK(abs_power_integral(u, 4) ==
          doctest::Approx(oracle::kArea * (1 + r * r) / (1 - r * r)).epsilon(1e-10));
    // w = (1)_{Psi,2} = k^{1/2} solves -Delta w + (3/4) w = (3/4) w^5.
    const ScalarField w = act(one, psi, 2.0);
    for (std::size_t i = 0; i < w.size(); i += 97) {
      const double res = -w.laplacians()[i] + 0.75 * w.value(i) - 0.75 * std::pow(w.value(i), 5);
      CHECK(std::abs(res) < 1e-10);
    }
  }
}

TEST_CASE("pullback gradients match finite differences") {
  const auto b = HarmonicBasis::build(3, QuadratureGrid::build(8));
  Coefficients c(3);
  c(0, 0) = 3;
  c(1, 2) = 0.4;
  c(3, 7) = -0.3;
  const auto f = ScalarField::from_coefficients(b, c);
  const MoebiusParam psi(Vec4(0.2, 0.1, -0.4, 0.2), random_rotation());
  const auto pulled = act(f, psi, 4.0);
  const double h = 1e-6;
  for (std::size_t i = 0; i < pulled.size(); i += 31) {
    const Vec4 w = pulled.grid()->node(i);
    for (const Vec4& t : tangent_frame(w)) {
      const std::array<Vec4, 2> pts{w * std::cos(h) + t * std::sin(h), w * std::cos(h) - t * std::sin(h)};
      const auto s = pulled.evaluate_at(pts, false);
      CHECK(std::abs((s.values[0] - s.values[1]) / (2 * h) - pulled.gradient(i).dot(t)) < 1e-7);
    }
  }
}

TEST_CASE("cocycle: ((f)_a)_b = (f)_{a o b}") {
  const auto b = HarmonicBasis::build(2, QuadratureGrid::build(24));
  Coefficients c(2);
  c(0, 0) = 4;
  c(2, 3) = 0.5;
  const auto f = ScalarField::from_coefficients(b, c);
  const MoebiusParam pa(Vec4(0.3, 0, 0.1, 0), random_rotation());
  const MoebiusParam pb(Vec4(0, -0.2, 0, 0.25));
  const auto twice = act(act(f, pa, 4.0), pb, 4.0);
  const auto once = act(f, compose(pa, pb), 4.0);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice.value(i) == doctest::Approx(once.value(i)).epsilon(1e-12));
    CHECK(twice.laplacians()[i] == doctest::Approx(once.laplacians()[i]).epsilon(1e-9));
  }
}

TEST_CASE("blow-up scan grows with |xi|") {
  const auto one = ScalarField::constant(QuadratureGrid::build(48), 1.0);
  const auto t = blowup_scan(one, 4.0, 4.0, {0.0, 0.3, 0.6, 0.9, 0.99});
  CHECK(t.monotone);
  CHECK(t.growth_checked);
  CHECK(t.growth_ok);
  CHECK(t.rows.front().norm == doctest::Approx(std::pow(oracle::kArea, 0.25)).epsilon(1e-12));
  CHECK(t.rows.back().log_k_jump > t.rows[1].log_k_jump);
  CHECK_FALSE(t.rows[1].under_resolved);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(MoebiusParam(Vec4(1, 0, 0, 0)), ContractViolation);
  Mat4 skew = Mat4::Identity();
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(MoebiusParam(Vec4::Zero(), skew), ContractViolation);
  CHECK_THROWS_AS(moebius_apply(MoebiusParam(), Vec4(2, 0, 0, 0)), ContractViolation);
  const auto g = QuadratureGrid::build(4);
  PointSamples s;
  s.values.assign(g->size(), 1.0);
  s.gradients.assign(g->size(), Vec4::Zero());
  CHECK_THROWS_AS(act(ScalarField::from_samples(g, s), MoebiusParam(), 4.0), ContractViolation);
  const auto one = ScalarField::constant(g, 1.0);
  CHECK_THROWS_AS(blowup_scan(one, 2.0, 4.0, {0.1}), ContractViolation);
  CHECK_THROWS_AS(blowup_scan(scale(one, -1), 4.0, 4.0, {0.1}), DomainError);
}
