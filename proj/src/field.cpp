#include "s3conf/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s3conf/errors.hpp"

namespace s3conf {

PointSamples AffineSource::evaluate(std::span<const Vec4> points, bool with_laplacian) const {
  PointSamples out = f_->evaluate(points, with_laplacian);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = a_ * out.values[i] + c_;
    out.gradients[i] *= a_;
    if (with_laplacian) out.laplacians[i] *= a_;
  }
  if (g_) {
    const PointSamples other = g_->evaluate(points, with_laplacian);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.values[i] += b_ * other.values[i];
      out.gradients[i] += b_ * other.gradients[i];
      if (with_laplacian) out.laplacians[i] += b_ * other.laplacians[i];
    }
  }
  return out;
}

namespace {

class ConstantSource final : public FieldSource {
 public:
  explicit ConstantSource(double c) : c_(c) {}
  PointSamples evaluate(std::span<const Vec4> points, bool with_laplacian) const override {
    PointSamples out;
    out.values.assign(points.size(), c_);
    out.gradients.assign(points.size(), Vec4::Zero());
    if (with_laplacian) out.laplacians.assign(points.size(), 0.0);
    return out;
  }

 private:
  double c_;
};

void require_same_grid(const ScalarField& f, const ScalarField& g) {
  if (f.grid() != g.grid()) throw ContractViolation("fields live on different grids");
}

bool shares_basis(const ScalarField& f, const ScalarField& g) {
  return f.coefficients() && g.coefficients() && f.basis() == g.basis();
}

bool is_positive_integer(double p) { return p > 0.0 && p == std::round(p); }

}  // namespace

ScalarField ScalarField::from_coefficients(BasisPtr basis, Coefficients coeffs) {
  if (!basis) throw ContractViolation("from_coefficients: null basis");
  if (coeffs.band_limit() > basis->band_limit()) {
    throw ContractViolation("from_coefficients: coefficients above the basis band limit");
  }
  coeffs = coeffs.resized(basis->band_limit());
  ScalarField f;
  f.grid_ = basis->grid();
  PointSamples s = basis->evaluate(coeffs, f.grid_->nodes(), true);
  f.values_ = std::move(s.values);
  f.gradients_ = std::move(s.gradients);
  f.laplacians_ = std::move(s.laplacians);
  f.source_ = std::make_shared<BandLimitedSource>(basis, coeffs);
  f.coeffs_ = std::move(coeffs);
  f.basis_ = std::move(basis);
  return f;
}

ScalarField ScalarField::constant(GridPtr grid, double c) {
  ScalarField f;
  f.values_.assign(grid->size(), c);
  f.gradients_.assign(grid->size(), Vec4::Zero());
  f.laplacians_.assign(grid->size(), 0.0);
  f.source_ = std::make_shared<ConstantSource>(c);
  f.grid_ = std::move(grid);
  return f;
}

ScalarField ScalarField::constant(BasisPtr basis, double c) {
  Coefficients coeffs(basis->band_limit());
  coeffs(0, 0) = c * std::sqrt(kSphereArea);
  return from_coefficients(std::move(basis), std::move(coeffs));
}

ScalarField ScalarField::from_source(GridPtr grid, SourcePtr source, bool with_laplacian) {
  if (!source) throw ContractViolation("from_source: null source");
  ScalarField f;
  PointSamples s = source->evaluate(grid->nodes(), with_laplacian);
  f.values_ = std::move(s.values);
  f.gradients_ = std::move(s.gradients);
  f.laplacians_ = std::move(s.laplacians);
  f.grid_ = std::move(grid);
  f.source_ = std::move(source);
  return f;
}

ScalarField ScalarField::from_samples(GridPtr grid, PointSamples samples) {
  const std::size_t n = grid->size();
  if (samples.values.size() != n || samples.gradients.size() != n ||
      (!samples.laplacians.empty() && samples.laplacians.size() != n)) {
    throw ContractViolation("from_samples: sample count does not match the grid");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double radial = grid->node(i).dot(samples.gradients[i]);
    if (std::abs(radial) > 1e-12 * std::max(1.0, samples.gradients[i].norm())) {
      throw ContractViolation("from_samples: gradient at node " + std::to_string(i) +
                              " is not tangent");
    }
  }
  ScalarField f;
  f.grid_ = std::move(grid);
  f.values_ = std::move(samples.values);
  f.gradients_ = std::move(samples.gradients);
  f.laplacians_ = std::move(samples.laplacians);
  return f;
}

PointSamples ScalarField::evaluate_at(std::span<const Vec4> points, bool with_laplacian) const {
  if (!source_) {
    throw ContractViolation("field cannot be evaluated off its grid (no coefficients or source)");
  }
  return source_->evaluate(points, with_laplacian);
}

ScalarField ScalarField::resampled(GridPtr grid, bool with_laplacian) const {
  if (!source_) throw ContractViolation("resampled: field has no source");
  ScalarField f = from_source(std::move(grid), source_, with_laplacian);
  return f;
}

std::size_t ScalarField::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) - values_.begin());
}

double ScalarField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::strictly_positive(const PositivityPolicy& policy) const {
  return min_value() > policy.strict_margin;
}

double ScalarField::integral() const { return grid_->integrate(values_); }

double ScalarField::gradient_energy() const {
  std::vector<double> sq(size());
  for (std::size_t i = 0; i < size(); ++i) sq[i] = gradients_[i].squaredNorm();
  return grid_->integrate(sq);
}

// ---------------------------------------------------------------------------

namespace {

ScalarField linear_combination(const ScalarField& f, double a, const ScalarField* g, double b,
                               double c) {
  PointSamples s;
  const std::size_t n = f.size();
  s.values.resize(n);
  s.gradients.resize(n);
  const bool lap = f.has_laplacians() && (!g || g->has_laplacians());
  if (lap) s.laplacians.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.values[i] = a * f.value(i) + c;
    s.gradients[i] = a * f.gradient(i);
    if (lap) s.laplacians[i] = a * f.laplacians()[i];
    if (g) {
      s.values[i] += b * g->value(i);
      s.gradients[i] += b * g->gradient(i);
      if (lap) s.laplacians[i] += b * g->laplacians()[i];
    }
  }
  return ScalarField::from_samples(f.grid(), std::move(s));
}

}  // namespace

// Linear operations keep coefficients when both sides share a basis and an
// off-grid source when both sides have one.
ScalarField add(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  if (shares_basis(f, g)) {
    return ScalarField::from_coefficients(f.basis(), *f.coefficients() + *g.coefficients());
  }
  if (f.evaluable() && g.evaluable()) {
    return ScalarField::from_source(
        f.grid(), std::make_shared<AffineSource>(f.source(), 1.0, g.source(), 1.0, 0.0),
        f.has_laplacians() && g.has_laplacians());
  }
  return linear_combination(f, 1.0, &g, 1.0, 0.0);
}

ScalarField sub(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  if (shares_basis(f, g)) {
    return ScalarField::from_coefficients(f.basis(), *f.coefficients() + (-1.0) * *g.coefficients());
  }
  if (f.evaluable() && g.evaluable()) {
    return ScalarField::from_source(
        f.grid(), std::make_shared<AffineSource>(f.source(), 1.0, g.source(), -1.0, 0.0),
        f.has_laplacians() && g.has_laplacians());
  }
  return linear_combination(f, 1.0, &g, -1.0, 0.0);
}

ScalarField scale(const ScalarField& f, double c) {
  if (f.coefficients()) return ScalarField::from_coefficients(f.basis(), c * *f.coefficients());
  if (f.evaluable()) {
    return ScalarField::from_source(
        f.grid(), std::make_shared<AffineSource>(f.source(), c, nullptr, 0.0, 0.0),
        f.has_laplacians());
  }
  return linear_combination(f, c, nullptr, 0.0, 0.0);
}

ScalarField shift(const ScalarField& f, double c) {
  if (f.coefficients()) {
    Coefficients coeffs = *f.coefficients();
    coeffs(0, 0) += c * std::sqrt(kSphereArea);
    return ScalarField::from_coefficients(f.basis(), std::move(coeffs));
  }
  if (f.evaluable()) {
    return ScalarField::from_source(
        f.grid(), std::make_shared<AffineSource>(f.source(), 1.0, nullptr, 0.0, c),
        f.has_laplacians());
  }
  return linear_combination(f, 1.0, nullptr, 0.0, c);
}

ScalarField mul(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  const std::size_t n = f.size();
  const bool lap = f.has_laplacians() && g.has_laplacians();
  PointSamples s;
  s.values.resize(n);
  s.gradients.resize(n);
  if (lap) s.laplacians.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = f.value(i);
    const double b = g.value(i);
    s.values[i] = a * b;
    s.gradients[i] = a * g.gradient(i) + b * f.gradient(i);
    if (lap) {
      s.laplacians[i] = a * g.laplacians()[i] + b * f.laplacians()[i] +
                        2.0 * f.gradient(i).dot(g.gradient(i));
    }
  }
  return ScalarField::from_samples(f.grid(), std::move(s));
}

ScalarField pow(const ScalarField& f, double alpha, const PositivityPolicy& policy) {
  const bool needs_positive = alpha < 0.0 || alpha != std::round(alpha);
  const std::size_t n = f.size();
  const bool lap = f.has_laplacians();
  PointSamples s;
  s.values.resize(n);
  s.gradients.resize(n);
  if (lap) s.laplacians.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f.value(i);
    if (needs_positive && !(v > policy.power_floor)) {
      throw DomainError("pow: exponent " + std::to_string(alpha) +
                            " needs a positive sample, got " + std::to_string(v),
                        i);
    }
    // v^alpha, v^(alpha-1), v^(alpha-2) without dividing by a possible zero.
    double p0;
    double p1;
    double p2;
    if (needs_positive) {
      const double lv = std::log(v);
      p0 = std::exp(alpha * lv);
      p1 = std::exp((alpha - 1.0) * lv);
      p2 = std::exp((alpha - 2.0) * lv);
    } else {
      p0 = std::pow(v, alpha);
      p1 = alpha >= 1.0 ? std::pow(v, alpha - 1.0) : 0.0;
      p2 = alpha >= 2.0 ? std::pow(v, alpha - 2.0) : 0.0;
    }
    const Vec4& g = f.gradient(i);
    s.values[i] = p0;
    s.gradients[i] = alpha * p1 * g;
    if (lap) {
      s.laplacians[i] = alpha * p1 * f.laplacians()[i] + alpha * (alpha - 1.0) * p2 * g.squaredNorm();
    }
  }
  return ScalarField::from_samples(f.grid(), std::move(s));
}

Coefficients reanalyze(const ScalarField& f, const HarmonicBasis& basis) {
  if (basis.grid() != f.grid()) throw ContractViolation("reanalyze: basis uses a different grid");
  return basis.analyze(f.values());
}

// ---------------------------------------------------------------------------

double abs_power_integral(const ScalarField& f, double p) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::pow(std::abs(f.value(i)), p);
  return f.grid()->integrate(v);
}

double gradient_power_integral(const ScalarField& f, double p) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double g2 = f.gradient(i).squaredNorm();
    v[i] = p == 2.0 ? g2 : (p == 4.0 ? g2 * g2 : std::pow(g2, 0.5 * p));
  }
  return f.grid()->integrate(v);
}

double lp_norm(const ScalarField& f, double p, const PositivityPolicy& policy) {
  if (p == 0.0 || !std::isfinite(p)) throw ContractViolation("lp_norm: exponent must be nonzero");
  if (is_positive_integer(p)) return std::pow(abs_power_integral(f, p), 1.0 / p);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.value(i);
    if (!(x > policy.power_floor)) {
      throw DomainError("lp_norm: exponent " + std::to_string(p) +
                            " needs a positive field, got " + std::to_string(x),
                        i);
    }
    v[i] = std::exp(p * std::log(x));
  }
  return std::pow(f.grid()->integrate(v), 1.0 / p);
}

double w1p_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw ContractViolation("w1p_norm: p must be >= 1");
  return std::pow(gradient_power_integral(f, p) + abs_power_integral(f, p), 1.0 / p);
}

double norm(const ScalarField& f, const NormKind& kind, const PositivityPolicy& policy) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LpNorm>) {
          return lp_norm(f, k.p, policy);
        } else {
          return w1p_norm(f, k.p);
        }
      },
      kind);
}

}  // namespace s3conf
