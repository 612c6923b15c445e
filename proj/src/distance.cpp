#include "s3conf/distance.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "s3conf/errors.hpp"
#include "s3conf/parallel.hpp"

namespace s3conf {

DistanceMoments distance_moments(const ScalarField& v) {
  const auto& grid = *v.grid();
  CompensatedSum area, m1, m2, m3, m4, g2, g4;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = grid.weight(i);
    const double x = v.value(i);
    const double x2 = x * x;
    const double d2 = v.gradient(i).squaredNorm();
    area.add(w);
    m1.add(w * x);
    m2.add(w * x2);
    m3.add(w * x2 * x);
    m4.add(w * x2 * x2);
    g2.add(w * d2);
    g4.add(w * d2 * d2);
  }
  return {area.value(), m1.value(), m2.value(), m3.value(), m4.value(), g2.value(), g4.value()};
}

Quartic distance_polynomial(const DistanceMoments& m) {
  // ||lv - 1||_{W12}^2 = l^2 (g2 + m2) - 2 l m1 + area
  // ||lv - 1||_{W14}^4 = l^4 (g4 + m4) - 4 l^3 m3 + 6 l^2 m2 - 4 l m1 + area
  Quartic q;
  q.c = {2.0 * m.area, -6.0 * m.m1, m.g2 + 7.0 * m.m2, -4.0 * m.m3, m.g4 + m.m4};
  return q;
}

LambdaSolution lambda_minimize(const DistanceMoments& m) {
  const QuarticMinimum best = minimize_quartic(distance_polynomial(m));
  return {best.argmin, best.value};
}

LambdaSolution lambda_minimize(const ScalarField& v) { return lambda_minimize(distance_moments(v)); }

Vec4 chart_to_ball(std::span<const double> rho) {
  const Vec4 r(rho[0], rho[1], rho[2], rho[3]);
  const double n = r.norm();
  if (n == 0.0) return Vec4::Zero();
  return (std::tanh(n) / n) * r;
}

namespace {

// Direct evaluation of ||lambda v - 1||_{W12}^2 + ||lambda v - 1||_{W14}^4,
// which keeps full relative accuracy when the value is tiny.
double direct_value(const ScalarField& v, double lambda) {
  const auto& grid = *v.grid();
  CompensatedSum acc;
  const double l2 = lambda * lambda;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = lambda * v.value(i) - 1.0;
    const double d2 = l2 * v.gradient(i).squaredNorm();
    const double r2 = r * r;
    acc.add(grid.weight(i) * (d2 + r2 + d2 * d2 + r2 * r2));
  }
  return acc.value();
}

}  // namespace

DistanceObjective::DistanceObjective(ScalarField u, DistOptions options)
    : u_(std::move(u)), options_(options) {}

const ScalarField& DistanceObjective::sampling_field(const Vec4& xi) const {
  if (xi.norm() <= options_.guard_radius) return u_;
  guard_used_ = true;
  std::lock_guard lock(fine_mutex_);
  if (!fine_) {
    const int target = std::min(2 * u_.grid()->exactness(), options_.max_exactness);
    fine_ = u_.resampled(QuadratureGrid::build(target, options_.max_exactness), false);
  }
  return *fine_;
}

LambdaSolution DistanceObjective::at(const Vec4& xi) const {
  const ScalarField& base = sampling_field(xi);
  const ScalarField v = act(base, MoebiusParam(xi), 4.0, false);
  LambdaSolution sol = lambda_minimize(v);
  sol.value = direct_value(v, sol.lambda);
  return sol;
}

DistWitness dist(const ScalarField& u, const DistOptions& options) {
  if (!u.evaluable()) {
    throw ContractViolation("dist: the field must be band-limited or carry a source");
  }
  if (!u.strictly_positive()) {
    throw DomainError("dist: u must be strictly positive", u.argmin());
  }
  if (options.restarts < 1) throw ConfigError("dist: restarts must be >= 1");

  const DistanceObjective objective(u, options);
  NelderMeadOptions nm;
  nm.initial_step = options.initial_step;
  nm.diameter_tol = options.tol;
  nm.stall_tol = options.stall_tol;
  nm.stall_window = options.stall_window;
  nm.max_iter = options.max_iter;

  DistWitness witness;
  witness.trace.resize(static_cast<std::size_t>(options.restarts));
  parallel_for(witness.trace.size(), options.jobs, [&](std::size_t r) {
    std::vector<double> start(4, 0.0);
    if (r > 0) {
      std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> offset(0.0, options.offset_scale);
      for (double& x : start) x = offset(rng);
    }
    const auto result = nelder_mead(
        [&](std::span<const double> rho) { return objective.at(chart_to_ball(rho)).value; }, start,
        nm);
    RestartTrace& t = witness.trace[r];
    t.best_value = result.value;
    t.xi = chart_to_ball(result.x);
    t.iterations = result.iterations;
    t.evaluations = result.evaluations;
    t.converged = result.converged;
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < witness.trace.size(); ++r) {
    if (witness.trace[r].best_value < witness.trace[best].best_value) best = r;
  }
  witness.xi_star = witness.trace[best].xi;
  witness.converged = std::any_of(witness.trace.begin(), witness.trace.end(),
                                  [](const RestartTrace& t) { return t.converged; });

  const LambdaSolution sol = objective.at(witness.xi_star);
  witness.lambda_star = sol.lambda;
  witness.guard_triggered = objective.guard_used();
  const ScalarField& base = objective.sampling_field(witness.xi_star);
  const ScalarField v = act(base, MoebiusParam(witness.xi_star), 4.0);
  witness.remainder = shift(scale(v, sol.lambda), -1.0);
  witness.w12_part = w1p_norm(witness.remainder, 2.0);
  witness.w14_part = w1p_norm(witness.remainder, 4.0);
  witness.value = std::pow(witness.w12_part, 2) + std::pow(witness.w14_part, 4);
  return witness;
}

OrthogonalityReport orthogonality_report(const ScalarField& r) {
  const auto& grid = *r.grid();
  std::vector<double> sq(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) sq[i] = r.value(i) * r.value(i);
  const double l2sq = grid.integrate(sq);
  OrthogonalityReport rep;
  if (l2sq == 0.0) return rep;
  const double w12sq = l2sq + r.gradient_energy();
  rep.c0 = std::abs(r.integral()) / l2sq;
  std::vector<double> moment(r.size());
  for (int c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < r.size(); ++i) moment[i] = grid.node(i)[c] * r.value(i);
    rep.c1 = std::max(rep.c1, std::abs(grid.integrate(moment)) / w12sq);
  }
  return rep;
}

FrequencySplit frequency_split(const Coefficients& r, int l_cut) {
  if (l_cut < 2) throw ConfigError("frequency_split: L_cut must be >= 2");
  FrequencySplit s;
  std::set<int> med;
  std::set<int> hi;
  for (int l = 2; l <= std::min(l_cut, r.band_limit()); ++l) med.insert(l);
  for (int l = l_cut + 1; l <= r.band_limit(); ++l) hi.insert(l);
  s.lo = project(r, {0, 1});
  s.med = project(r, med);
  s.hi = project(r, hi);
  s.hi_empty = l_cut >= r.band_limit();
  return s;
}

}  // namespace s3conf
