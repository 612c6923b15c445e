#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "s3conf/errors.hpp"
#include "s3conf/harmonics.hpp"

using namespace s3conf;

namespace {

Vec4 random_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  return Vec4(n(rng), n(rng), n(rng), n(rng)).normalized();
}

// Homogeneous extension |x|^l Y(x/|x|) of a single basis function.
double extended(const HarmonicBasis& b, std::size_t idx, int l, const Vec4& x) {
  Coefficients c(b.band_limit());
  c.values()[static_cast<Eigen::Index>(idx)] = 1.0;
  const Vec4 p = x.normalized();
  return std::pow(x.norm(), l) * b.synthesize(c, std::span<const Vec4>(&p, 1))[0];
}

}  // namespace

TEST_CASE("block layout") {
  std::size_t n = 0;
  for (int L = 0; L <= 10; ++L) {
    n += static_cast<std::size_t>((L + 1) * (L + 1));
    CHECK(Coefficients::dimension(L) == n);
  }
  CHECK(Coefficients::index(0, 0) == 0);
  CHECK(Coefficients::index(1, 0) == 1);
  CHECK(Coefficients::index(2, 0) == 5);
  CHECK(Coefficients::degree_of(4) == 1);
  CHECK(Coefficients::degree_of(5) == 2);
  CHECK(Coefficients::degree_of(Coefficients::dimension(6) - 1) == 6);
}

TEST_CASE("Gram identity, eigenvalues and gradient energies up to l = 6") {
  const int L = 6;
  const auto grid = QuadratureGrid::build(2 * L + 2);
  const auto b = HarmonicBasis::build(L, grid);
  const auto& V = b->node_values();
  const auto& w = grid->weights();
  Eigen::MatrixXd G = V * Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()).asDiagonal() * V.transpose();
  CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-10);

  for (std::size_t idx = 0; idx < b->size(); ++idx) {
    const int l = Coefficients::degree_of(idx);
    const auto grad = b->basis_gradient(idx);
    std::vector<double> g2(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) g2[i] = grad[i].squaredNorm();
    CHECK(std::abs(grid->integrate(g2) - l * (l + 2.0)) < 1e-8);
    CHECK(laplace_eigenvalue(l) == l * (l + 2.0));
  }
}

TEST_CASE("basis functions are restrictions of harmonic polynomials") {
  // The ambient Laplacian of the homogeneous extension vanishes; with
  // homogeneity this gives -Delta_S Y = l(l+2) Y independently of the
  // stored eigenvalue.
  const int L = 5;
  const auto b = HarmonicBasis::build(L, QuadratureGrid::build(2 * L));
  std::mt19937_64 rng(3);
  const double h = 1e-3;
  for (std::size_t idx = 0; idx < b->size(); idx += 3) {
    const int l = Coefficients::degree_of(idx);
    const Vec4 x = random_point(rng);
    double lap = 0;
    const double f0 = extended(*b, idx, l, x);
    for (int a = 0; a < 4; ++a) {
      Vec4 e = Vec4::Zero();
      e[a] = h;
      lap += (extended(*b, idx, l, x + e) - 2 * f0 + extended(*b, idx, l, x - e)) / (h * h);
    }
    CHECK(std::abs(lap) < 1e-4);
  }
}

TEST_CASE("addition theorem: sum_k Y_k^2 = (l+1)^2 / |S^3|") {
  const int L = 4;
  const auto b = HarmonicBasis::build(L, QuadratureGrid::build(2 * L));
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec4 p = random_point(rng);
    for (int l = 0; l <= L; ++l) {
      double s = 0;
      for (int k = 0; k < (l + 1) * (l + 1); ++k) {
        Coefficients c(L);
        c(l, k) = 1.0;
        const double y = b->synthesize(c, std::span<const Vec4>(&p, 1))[0];
        s += y * y;
      }
      CHECK(s == doctest::Approx((l + 1.0) * (l + 1.0) / oracle::kArea).epsilon(1e-11));
    }
  }
}

TEST_CASE("evaluate: values, gradients and Laplacians off the grid") {
  const int L = 4;
  const auto b = HarmonicBasis::build(L, QuadratureGrid::build(2 * L));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  Coefficients c(L);
  for (Eigen::Index i = 0; i < c.values().size(); ++i) c.values()[i] = n(rng);
  std::vector<Vec4> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(random_point(rng));
  const auto s = b->evaluate(c, pts, true);
  const auto plain = b->synthesize(c, pts);
  const auto lapc = b->synthesize(laplacian(c), pts);
  const double h = 1e-6;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(s.values[i] == doctest::Approx(plain[i]).epsilon(1e-13));
    CHECK(s.laplacians[i] == doctest::Approx(lapc[i]).epsilon(1e-11));
    CHECK(std::abs(s.gradients[i].dot(pts[i])) < 1e-12);
    // Directional derivative along a tangent great circle.
    Vec4 t = Vec4(n(rng), n(rng), n(rng), n(rng));
    t -= t.dot(pts[i]) * pts[i];
    t.normalize();
    const Vec4 pp = (pts[i] * std::cos(h) + t * std::sin(h));
    const Vec4 pm = (pts[i] * std::cos(h) - t * std::sin(h));
    const double fd = (b->synthesize(c, std::span<const Vec4>(&pp, 1))[0] -
                       b->synthesize(c, std::span<const Vec4>(&pm, 1))[0]) / (2 * h);
    CHECK(std::abs(fd - s.gradients[i].dot(t)) < 1e-7);
  }
}

TEST_CASE("analyze inverts synthesis and Parseval holds") {
  const int L = 5;
  const auto grid = QuadratureGrid::build(2 * L + 1);
  const auto b = HarmonicBasis::build(L, grid);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 1);
  Coefficients c(L);
  for (Eigen::Index i = 0; i < c.values().size(); ++i) c.values()[i] = n(rng);
  const auto vals = b->synthesize(c, grid->nodes());
  const auto back = b->analyze(vals);
  CHECK((back.values() - c.values()).cwiseAbs().maxCoeff() < 1e-12);
  std::vector<double> sq(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) sq[i] = vals[i] * vals[i];
  double e = 0;
  for (double x : degree_energies(c)) e += x;
  CHECK(grid->integrate(sq) == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("coefficient algebra") {
  Coefficients a(2), b(1);
  a(2, 3) = 1.5;
  b(1, 2) = 2.0;
  const Coefficients s = a + b;
  CHECK(s.band_limit() == 2);
  CHECK(s(1, 2) == 2.0);
  CHECK(s(2, 3) == 1.5);
  CHECK(project(s, {1})(2, 3) == 0.0);
  CHECK(laplacian(s)(2, 3) == -8 * 1.5);
  CHECK(s.resized(1).size() == Coefficients::dimension(1));
}

TEST_CASE("errors") {
  const auto g = QuadratureGrid::build(6);
  const auto b = HarmonicBasis::build(4, g);
  std::vector<double> v(g->size(), 1.0);
  CHECK_THROWS_AS(b->analyze(v), ConfigError);
  const auto b2 = HarmonicBasis::build(3, g);
  std::vector<double> shorter(g->size() - 1, 1.0);
  CHECK_THROWS_AS(b2->analyze(shorter), ContractViolation);
  const Vec4 off(1.1, 0, 0, 0);
  CHECK_THROWS_AS(b2->synthesize(Coefficients(3), std::span<const Vec4>(&off, 1)), ContractViolation);
  CHECK_THROWS_AS(b2->synthesize(Coefficients(5), g->nodes()), ContractViolation);
}
