#include "s3conf/harmonics.hpp"

#include <cmath>
#include <map>
#include <string>

#include "s3conf/errors.hpp"

namespace s3conf {

// ---------------------------------------------------------------------------
// Coefficients

Coefficients::Coefficients(int band_limit)
    : band_limit_(band_limit), values_(Eigen::VectorXd::Zero(dimension(band_limit))) {
  if (band_limit < 0) throw ConfigError("negative band limit");
}

Coefficients::Coefficients(int band_limit, Eigen::VectorXd values)
    : band_limit_(band_limit), values_(std::move(values)) {
  if (band_limit < 0) throw ConfigError("negative band limit");
  if (static_cast<std::size_t>(values_.size()) != dimension(band_limit)) {
    throw ContractViolation("coefficient vector of length " + std::to_string(values_.size()) +
                            " does not match band limit " + std::to_string(band_limit));
  }
}

std::size_t Coefficients::dimension(int band_limit) {
  const std::size_t l = static_cast<std::size_t>(band_limit) + 1;
  return l * (l + 1) * (2 * l + 1) / 6;
}

std::size_t Coefficients::index(int degree, int k) { return dimension(degree - 1) + k; }

int Coefficients::degree_of(std::size_t index) {
  int l = 0;
  while (dimension(l) <= index) ++l;
  return l;
}

Coefficients Coefficients::resized(int band_limit) const {
  Coefficients out(band_limit);
  const auto n = std::min(out.values_.size(), values_.size());
  out.values_.head(n) = values_.head(n);
  return out;
}

Coefficients& Coefficients::operator+=(const Coefficients& other) {
  if (other.band_limit_ > band_limit_) *this = resized(other.band_limit_);
  values_.head(other.values_.size()) += other.values_;
  return *this;
}

Coefficients& Coefficients::operator*=(double s) {
  values_ *= s;
  return *this;
}

Coefficients operator+(Coefficients a, const Coefficients& b) { return a += b; }
Coefficients operator*(double s, Coefficients a) { return a *= s; }

Coefficients laplacian(const Coefficients& c) {
  Coefficients out = c;
  for (int l = 0; l <= c.band_limit(); ++l) {
    const auto start = Coefficients::dimension(l - 1);
    const auto count = static_cast<Eigen::Index>((l + 1) * (l + 1));
    out.values().segment(start, count) *= -laplace_eigenvalue(l);
  }
  return out;
}

Coefficients project(const Coefficients& c, const std::set<int>& degrees) {
  Coefficients out(c.band_limit());
  for (int l : degrees) {
    if (l < 0 || l > c.band_limit()) continue;
    const auto start = Coefficients::dimension(l - 1);
    const auto count = static_cast<Eigen::Index>((l + 1) * (l + 1));
    out.values().segment(start, count) = c.values().segment(start, count);
  }
  return out;
}

std::vector<double> degree_energies(const Coefficients& c) {
  std::vector<double> out(c.band_limit() + 1, 0.0);
  for (int l = 0; l <= c.band_limit(); ++l) {
    const auto start = Coefficients::dimension(l - 1);
    const auto count = static_cast<Eigen::Index>((l + 1) * (l + 1));
    out[l] = c.values().segment(start, count).squaredNorm();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial construction

namespace {

using Exponent = std::array<int, 4>;
using Poly = std::map<Exponent, double>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      Exponent e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
      out[e] += ca * cb;
    }
  }
  return out;
}

Poly power(const Poly& p, int n) {
  Poly out{{Exponent{0, 0, 0, 0}, 1.0}};
  for (int i = 0; i < n; ++i) out = multiply(out, p);
  return out;
}

Poly add(Poly a, const Poly& b, double scale = 1.0) {
  for (const auto& [e, c] : b) a[e] += scale * c;
  return a;
}

Poly monomial(int var, int power_of) {
  Exponent e{0, 0, 0, 0};
  e[var] = power_of;
  return Poly{{e, 1.0}};
}

// Coefficients of C_n^{(alpha)}(t) = sum_k g_k t^{n-2k}.
std::vector<double> gegenbauer_coefficients(int n, double alpha) {
  std::vector<double> g;
  for (int k = 0; 2 * k <= n; ++k) {
    // Gamma(n - k + alpha) / (Gamma(alpha) k! (n - 2k)!) * 2^{n-2k} * (-1)^k
    double c = 1.0;
    for (int j = 0; j < n - k; ++j) c *= (alpha + j);
    for (int j = 2; j <= k; ++j) c /= j;
    for (int j = 2; j <= n - 2 * k; ++j) c /= j;
    c *= std::pow(2.0, n - 2 * k);
    if (k % 2 == 1) c = -c;
    g.push_back(c);
  }
  return g;
}

// Homogeneous polynomial |x|^n C_n^{(alpha)}(x_var / |x|) in the variables
// selected by `vars` (the radius runs over `vars` only).
Poly homogenized_gegenbauer(int n, double alpha, int var, const std::vector<int>& vars) {
  Poly r2;
  for (int v : vars) r2 = add(r2, monomial(v, 2));
  const auto g = gegenbauer_coefficients(n, alpha);
  Poly out;
  for (int k = 0; k < static_cast<int>(g.size()); ++k) {
    out = add(out, multiply(monomial(var, n - 2 * k), power(r2, k)), g[k]);
  }
  return out;
}

// Re / Im of (x_3 + i x_4)^n (variables 2 and 3 zero based).
Poly azimuthal(int n, bool sine) {
  Poly out;
  double binom = 1.0;
  for (int j = 0; j <= n; ++j) {
    // term C(n,j) x3^{n-j} (i x4)^j ; i^j real for even j, imaginary for odd.
    const bool imaginary = (j % 2 == 1);
    if (imaginary == sine) {
      const int quarter = (j / 2) % 2;
      const double sign = quarter == 0 ? 1.0 : -1.0;
      Exponent e{0, 0, n - j, j};
      out[e] += sign * binom;
    }
    binom = binom * (n - j) / (j + 1);
  }
  return out;
}

// Unnormalized harmonic for degree l, S^2 sub-degree m, azimuthal order n.
Poly gegenbauer_product(int l, int m, int n) {
  const int an = std::abs(n);
  const Poly radial4 = homogenized_gegenbauer(l - m, m + 1.0, 0, {0, 1, 2, 3});
  const Poly radial3 = homogenized_gegenbauer(m - an, an + 0.5, 1, {1, 2, 3});
  const Poly az = azimuthal(an, n < 0);
  return multiply(radial4, multiply(radial3, az));
}

std::vector<Exponent> monomials_of_degree(int l) {
  std::vector<Exponent> out;
  for (int a = l; a >= 0; --a)
    for (int b = l - a; b >= 0; --b)
      for (int c = l - a - b; c >= 0; --c) out.push_back({a, b, c, l - a - b - c});
  return out;
}

std::array<std::vector<double>, 4> powers_at(const Vec4& x, int max_power) {
  std::array<std::vector<double>, 4> p;
  for (int i = 0; i < 4; ++i) {
    p[i].resize(max_power + 1);
    p[i][0] = 1.0;
    for (int k = 1; k <= max_power; ++k) p[i][k] = p[i][k - 1] * x[i];
  }
  return p;
}

void check_unit(const Vec4& p, std::size_t i) {
  if (std::abs(p.norm() - 1.0) > 1e-12) {
    throw ContractViolation("point " + std::to_string(i) + " is not on the unit sphere (|p| = " +
                            std::to_string(p.norm()) + ")");
  }
}

}  // namespace

void HarmonicBasis::fill_monomials(int degree, const std::array<std::vector<double>, 4>& powers,
                                   Eigen::VectorXd& out) const {
  const auto& ex = degrees_[degree].exponents;
  out.resize(static_cast<Eigen::Index>(ex.size()));
  for (std::size_t j = 0; j < ex.size(); ++j) {
    const auto& e = ex[j];
    out[static_cast<Eigen::Index>(j)] =
        powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]] * powers[3][e[3]];
  }
}

std::shared_ptr<const HarmonicBasis> HarmonicBasis::build(int band_limit, GridPtr grid) {
  if (band_limit < 0) throw ConfigError("negative band limit");
  if (!grid) throw ContractViolation("HarmonicBasis::build: null grid");

  auto basis = std::shared_ptr<HarmonicBasis>(new HarmonicBasis());
  basis->band_limit_ = band_limit;
  basis->grid_ = std::move(grid);

  for (int l = 0; l <= band_limit; ++l) {
    DegreeTable table;
    table.degree = l;
    table.exponents = monomials_of_degree(l);
    std::vector<int> lookup(static_cast<std::size_t>((l + 1) * (l + 1) * (l + 1)), -1);
    for (std::size_t j = 0; j < table.exponents.size(); ++j) {
      const auto& e = table.exponents[j];
      lookup[(e[0] * (l + 1) + e[1]) * (l + 1) + e[2]] = static_cast<int>(j);
    }
    const int count = (l + 1) * (l + 1);
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(count, static_cast<Eigen::Index>(table.exponents.size()));
    for (int m = 0; m <= l; ++m) {
      for (int n = -m; n <= m; ++n) {
        const int row = m * m + n + m;
        for (const auto& [e, c] : gegenbauer_product(l, m, n)) {
          raw(row, lookup[(e[0] * (l + 1) + e[1]) * (l + 1) + e[2]]) += c;
        }
      }
    }
    table.poly = std::move(raw);
    basis->degrees_.push_back(std::move(table));
    basis->lookup_.push_back(std::move(lookup));
  }

  // Orthonormalize each degree block against a grid exact for products.
  for (int l = 0; l <= band_limit; ++l) {
    const auto canonical = QuadratureGrid::build(std::max(2, 2 * l), std::max(2, 2 * l));
    auto& table = basis->degrees_[l];
    Eigen::MatrixXd vals(table.poly.rows(), static_cast<Eigen::Index>(canonical->size()));
    Eigen::VectorXd mono;
    for (std::size_t i = 0; i < canonical->size(); ++i) {
      basis->fill_monomials(l, powers_at(canonical->node(i), l), mono);
      vals.col(static_cast<Eigen::Index>(i)) = table.poly * mono;
    }
    const Eigen::Map<const Eigen::VectorXd> w(canonical->weights().data(),
                                              static_cast<Eigen::Index>(canonical->size()));
    const Eigen::MatrixXd gram = vals * w.asDiagonal() * vals.transpose();
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    table.poly = llt.matrixL().solve(table.poly);
  }

  const auto& g = *basis->grid_;
  basis->node_values_.resize(static_cast<Eigen::Index>(basis->size()), static_cast<Eigen::Index>(g.size()));
  Eigen::VectorXd mono;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto powers = powers_at(g.node(i), band_limit);
    for (int l = 0; l <= band_limit; ++l) {
      basis->fill_monomials(l, powers, mono);
      const auto start = static_cast<Eigen::Index>(Coefficients::dimension(l - 1));
      basis->node_values_.block(start, static_cast<Eigen::Index>(i), (l + 1) * (l + 1), 1) =
          basis->degrees_[l].poly * mono;
    }
  }
  return basis;
}

Coefficients HarmonicBasis::analyze(std::span<const double> values) const {
  if (grid_->exactness() < 2 * band_limit_) {
    throw ConfigError("analysis at band limit " + std::to_string(band_limit_) +
                      " needs grid exactness >= " + std::to_string(2 * band_limit_) + ", have " +
                      std::to_string(grid_->exactness()));
  }
  if (values.size() != grid_->size()) {
    throw ContractViolation("analyze: value count does not match the grid");
  }
  Eigen::VectorXd weighted(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw NumericError("analyze: non-finite sample", i);
    weighted[static_cast<Eigen::Index>(i)] = values[i] * grid_->weight(i);
  }
  return Coefficients(band_limit_, node_values_ * weighted);
}

std::vector<double> HarmonicBasis::synthesize(const Coefficients& c,
                                              std::span<const Vec4> points) const {
  return evaluate(c, points, false).values;
}

PointSamples HarmonicBasis::evaluate(const Coefficients& c, std::span<const Vec4> points,
                                     bool with_laplacian) const {
  if (c.band_limit() > band_limit_) {
    throw ContractViolation("coefficients above the basis band limit");
  }
  const int top = c.band_limit();

  // Collapse coefficients to one monomial vector per degree, plus the
  // monomial vectors of its four partial derivatives (degree l - 1).
  std::vector<Eigen::VectorXd> combined(top + 1);
  std::vector<std::array<Eigen::VectorXd, 4>> partials(top + 1);
  for (int l = 0; l <= top; ++l) {
    const auto start = static_cast<Eigen::Index>(Coefficients::dimension(l - 1));
    combined[l] = degrees_[l].poly.transpose() * c.values().segment(start, (l + 1) * (l + 1));
    if (l == 0) continue;
    const auto& ex = degrees_[l].exponents;
    const auto& lower = lookup_[l - 1];
    for (int v = 0; v < 4; ++v) {
      partials[l][v] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(degrees_[l - 1].exponents.size()));
    }
    for (std::size_t j = 0; j < ex.size(); ++j) {
      for (int v = 0; v < 4; ++v) {
        if (ex[j][v] == 0) continue;
        Exponent e = ex[j];
        e[v] -= 1;
        const int idx = lower[(e[0] * l + e[1]) * l + e[2]];
        partials[l][v][idx] += ex[j][v] * combined[l][static_cast<Eigen::Index>(j)];
      }
    }
  }

  PointSamples out;
  out.values.resize(points.size());
  out.gradients.resize(points.size());
  if (with_laplacian) out.laplacians.resize(points.size());

  std::vector<Eigen::VectorXd> mono(top + 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec4& x = points[i];
    check_unit(x, i);
    const auto powers = powers_at(x, top);
    for (int l = 0; l <= top; ++l) fill_monomials(l, powers, mono[l]);
    double value = 0.0;
    double lap = 0.0;
    Vec4 grad = Vec4::Zero();
    for (int l = 0; l <= top; ++l) {
      const double part = combined[l].dot(mono[l]);
      value += part;
      lap -= laplace_eigenvalue(l) * part;
      if (l > 0) {
        for (int v = 0; v < 4; ++v) grad[v] += partials[l][v].dot(mono[l - 1]);
      }
    }
    out.values[i] = value;
    out.gradients[i] = grad - x.dot(grad) * x;
    if (with_laplacian) out.laplacians[i] = lap;
  }
  return out;
}

std::vector<Vec4> HarmonicBasis::basis_gradient(std::size_t index) const {
  Coefficients unit(band_limit_);
  unit.values()[static_cast<Eigen::Index>(index)] = 1.0;
  return evaluate(unit, grid_->nodes(), false).gradients;
}

}  // namespace s3conf
