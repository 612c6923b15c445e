#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "s3conf/distance.hpp"
#include "s3conf/field.hpp"
#include "s3conf/functionals.hpp"
#include "s3conf/moebius.hpp"

namespace s3conf {

// ---------------------------------------------------------------------------
// Feasible samples

struct SampleOptions {
  std::uint64_t seed = 0;
  int band_limit = 4;
  double amplitude = 0.05;
  std::size_t count = 1;
  // Post-compose each accepted draw with (.)_{Psi_xi}, q = 4, |xi| <= moebius_radius.
  bool moebius = false;
  double moebius_radius = 0.5;
  // Abort once the acceptance rate is provably below this.
  double min_acceptance = 0.01;
  PositivityPolicy positivity;
};

struct Sample {
  std::size_t draw = 0;  // index of the accepted draw
  Coefficients base;     // 1 + perturbation, before any Moebius action
  std::optional<MoebiusParam> psi;
  ScalarField field;
  double sigma1_min = 0;
};

struct SampleSet {
  std::vector<Sample> samples;
  std::size_t attempts = 0;
  double acceptance_rate = 0;
};

// Perturbation law of draw `draw`: coefficient (l, k), l >= 1, is
// N(0, 1) * a / (1 + l)^2; the constant part is 1. Deterministic in (seed, draw).
Coefficients random_perturbation(std::uint64_t seed, std::size_t draw, int band_limit,
                                 double amplitude);

// The field a Sample describes, rebuilt on `basis` (used to re-validate
// serialized samples).
ScalarField sample_field(const BasisPtr& basis, const Coefficients& base,
                         const std::optional<MoebiusParam>& psi);

// Rejection sampling of u > 0, sigma_1(u) > 0 at every node. Throws
// ConfigError when the acceptance rate falls below options.min_acceptance.
SampleSet sample_feasible(const BasisPtr& basis, const SampleOptions& options);

// ---------------------------------------------------------------------------
// Stability scan

struct DeficitReport {
  std::size_t sample = 0;
  std::string field_id;
  double theta = 0;
  double deficit = 0;
  double dist_value = 0;
  // deficit / dist when dist > 1e-14; otherwise the sample sits at the
  // optimizer and no quotient is formed.
  std::optional<double> ratio;
  bool at_optimizer = false;
  double lambda_star = 1;
  Vec4 xi_star = Vec4::Zero();
  bool converged = true;
  FunctionalValues values;
  W14L4Diagnostic w14_l4;
  OrthogonalityReport orthogonality;
  int exactness = 0;
  std::uint64_t seed = 0;
};

struct ThetaSummary {
  double theta = 0;
  // Smallest deficit/dist over the samples: an observed lower estimate of
  // the stability constant, not a bound on it.
  std::optional<double> min_ratio;
  std::size_t min_ratio_sample = 0;
  double min_deficit = 0;
  std::size_t ratios = 0;
};

struct StabilitySummary {
  std::vector<ThetaSummary> per_theta;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<std::string> skip_reasons;
  // min ratio(theta = 3) >= F1[1]^{-2} min ratio(theta = 1) - tolerance,
  // when both thetas were scanned.
  bool cross_check_available = false;
  bool cross_check_ok = false;
  double cross_check_lhs = 0;
  double cross_check_rhs = 0;
  // Samples with deficit(theta = 1) < 1e-3 F2[1] and whether all of them pass
  // the W^{1,4}-L^4 bound.
  std::size_t near_minimizers = 0;
  bool near_minimizers_pass = true;
  static constexpr const char* kLabel = "observed lower estimate";
};

struct StabilityOptions {
  bool with_dist = true;
  DistOptions dist;
  DeficitOptions deficit;
  double cross_check_tol = 1e-8;
  int jobs = 1;
};

struct StabilityScan {
  std::vector<DeficitReport> reports;  // sample-major, then theta order
  StabilitySummary summary;
};

struct LabeledField {
  std::string id;
  ScalarField field;
};

StabilityScan stability_scan(const std::vector<LabeledField>& samples,
                             const std::vector<double>& thetas,
                             const StabilityOptions& options = {});

// ---------------------------------------------------------------------------
// Sharpness scan

struct SharpnessRow {
  double epsilon = 0;
  bool feasible = true;
  std::string note;
  double deficit = 0;
  double dist_value = 0;
  std::optional<double> ratio;
  bool in_window = false;
};

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  std::size_t points = 0;
};

// Least-squares fit of log y against log x. Throws ContractViolation for
// fewer than two points or non-positive data.
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SharpnessOptions {
  double theta = 1.0;
  DistOptions dist;
  DeficitOptions deficit;
  std::size_t window = 3;
  double noise_multiple = 1e3;
};

struct SharpnessTable {
  std::vector<SharpnessRow> rows;  // ascending epsilon
  double noise_floor = 0;
  std::optional<SlopeFit> deficit_fit;  // over the asymptotic window
  std::optional<SlopeFit> dist_fit;
  std::optional<double> ratio_limit;    // mean ratio over the window
  std::optional<double> ratio_spread;   // (max - min) / mean over the window
};

// Rows for u = 1 + eps phi. phi must carry coefficients and have zero mean
// (ContractViolation otherwise); infeasible rows are kept with a note and
// left out of the fits.
SharpnessTable sharpness_scan(const ScalarField& phi, std::vector<double> epsilons,
                              const SharpnessOptions& options = {});

// ---------------------------------------------------------------------------
// Hessian check

struct HessianOptions {
  int k = 0;              // basis function within the degree
  int exactness = 0;      // 0: 4l + 8
  double step = 1e-2;     // initial stencil h
  double max_step = 0.1;
  double resolution = 1e-6;  // required round-off noise / 16 |S^3|^{1/3}
};

struct HessianCheck {
  int degree = 0;
  double fd_value = 0;
  double formula_value = 0;
  double rel_err = 0;  // |fd - formula| / |formula|, or |fd| / 16|S^3|^{1/3} at l = 1
  double noise = 0;    // round-off plus extrapolation spread
  double step = 0;     // final stencil
  int widenings = 0;
};

// 16 |S^3|^{1/3} (l(l+2) - 3).
double hessian_formula(int degree);

// Second derivative at 0 of eps -> F2[1] - F2[1 + eps Y_l] by Richardson-
// extrapolated central differences at h, h/2, h/4. Throws ConfigError for
// degree < 1 or an exactness below 4l + 4.
HessianCheck hessian_check(int degree, const HessianOptions& options = {});

}  // namespace s3conf
