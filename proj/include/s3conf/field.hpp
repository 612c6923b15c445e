#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "s3conf/harmonics.hpp"
#include "s3conf/quadrature.hpp"
#include "s3conf/types.hpp"

namespace s3conf {

// Anything that can be sampled at arbitrary points of S^3: band-limited
// expansions, their Moebius pullbacks, and linear combinations of those.
class FieldSource {
 public:
  virtual ~FieldSource() = default;
  virtual PointSamples evaluate(std::span<const Vec4> points, bool with_laplacian) const = 0;
};

using SourcePtr = std::shared_ptr<const FieldSource>;

class BandLimitedSource final : public FieldSource {
 public:
  BandLimitedSource(BasisPtr basis, Coefficients coeffs)
      : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {}
  PointSamples evaluate(std::span<const Vec4> points, bool with_laplacian) const override {
    return basis_->evaluate(coeffs_, points, with_laplacian);
  }

 private:
  BasisPtr basis_;
  Coefficients coeffs_;
};

// a * f + b * g + c.
class AffineSource final : public FieldSource {
 public:
  AffineSource(SourcePtr f, double a, SourcePtr g, double b, double c)
      : f_(std::move(f)), g_(std::move(g)), a_(a), b_(b), c_(c) {}
  PointSamples evaluate(std::span<const Vec4> points, bool with_laplacian) const override;

 private:
  SourcePtr f_;
  SourcePtr g_;
  double a_;
  double b_;
  double c_;
};

// Tolerances shared by the positivity checks.
struct PositivityPolicy {
  // Negative or fractional powers refuse samples at or below this floor.
  double power_floor = 1e-13;
  // "Strictly positive" on the grid means min value above this margin.
  double strict_margin = 1e-10;
};

// A function on the sphere sampled at the nodes of a quadrature grid:
// values, tangential gradients and (when derivable) Laplacians. Fields built
// from coefficients keep them; fields with a source can be re-sampled at
// arbitrary points (needed for pullbacks). Immutable once built.
class ScalarField {
 public:
  // Empty field with no grid.
  ScalarField() = default;

  static ScalarField from_coefficients(BasisPtr basis, Coefficients coeffs);
  static ScalarField constant(GridPtr grid, double c);
  static ScalarField constant(BasisPtr basis, double c);
  static ScalarField from_source(GridPtr grid, SourcePtr source, bool with_laplacian = true);
  // Raw samples; not evaluable off-grid. Throws ContractViolation on size
  // mismatch or a gradient that is not tangent (1e-12).
  static ScalarField from_samples(GridPtr grid, PointSamples samples);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const Vec4> gradients() const { return gradients_; }
  std::span<const double> laplacians() const { return laplacians_; }
  bool has_laplacians() const { return !laplacians_.empty(); }
  double value(std::size_t i) const { return values_[i]; }
  const Vec4& gradient(std::size_t i) const { return gradients_[i]; }

  const std::optional<Coefficients>& coefficients() const { return coeffs_; }
  const BasisPtr& basis() const { return basis_; }
  const SourcePtr& source() const { return source_; }
  bool evaluable() const { return static_cast<bool>(source_); }

  // Re-samples the field at arbitrary unit points. Throws ContractViolation
  // when the field has no source.
  PointSamples evaluate_at(std::span<const Vec4> points, bool with_laplacian) const;

  // The same function sampled on a different grid (requires a source).
  ScalarField resampled(GridPtr grid, bool with_laplacian = true) const;

  // Node of the smallest value.
  std::size_t argmin() const;
  double min_value() const { return values_[argmin()]; }
  double max_value() const;
  bool strictly_positive(const PositivityPolicy& policy = {}) const;

  double integral() const;
  double gradient_energy() const;  // int |grad f|^2

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::vector<Vec4> gradients_;
  std::vector<double> laplacians_;
  std::optional<Coefficients> coeffs_;
  BasisPtr basis_;
  SourcePtr source_;
};

// ---------------------------------------------------------------------------
// Pointwise algebra. Gradients and Laplacians follow the product and chain
// rules; coefficients survive only linear operations.

ScalarField add(const ScalarField& f, const ScalarField& g);
ScalarField sub(const ScalarField& f, const ScalarField& g);
ScalarField mul(const ScalarField& f, const ScalarField& g);
ScalarField scale(const ScalarField& f, double c);
// f + c.
ScalarField shift(const ScalarField& f, double c);
// f^alpha; negative or fractional alpha require f above the power floor.
ScalarField pow(const ScalarField& f, double alpha, const PositivityPolicy& policy = {});

// Re-expands a field at band limit `band_limit` with the basis' grid
// (explicit aliasing step). The basis must share the field's grid.
Coefficients reanalyze(const ScalarField& f, const HarmonicBasis& basis);

// ---------------------------------------------------------------------------
// Norms

struct LpNorm {
  double p;
};
struct W1pNorm {
  double p;
};
using NormKind = std::variant<LpNorm, W1pNorm>;

// (int f^p)^{1/p}, p != 0. Negative p is evaluated in log space.
double lp_norm(const ScalarField& f, double p, const PositivityPolicy& policy = {});
// (int |grad f|^p + int |f|^p)^{1/p}, p >= 1.
double w1p_norm(const ScalarField& f, double p);
double norm(const ScalarField& f, const NormKind& kind, const PositivityPolicy& policy = {});

// int |f|^p and int |grad f|^p (p > 0).
double abs_power_integral(const ScalarField& f, double p);
double gradient_power_integral(const ScalarField& f, double p);

}  // namespace s3conf
