#include "s3conf/experiments.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>

#include "s3conf/errors.hpp"
#include "s3conf/parallel.hpp"

namespace s3conf {

namespace {

std::mt19937_64 draw_engine(std::uint64_t seed, std::size_t draw) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
  return std::mt19937_64(seq);
}

Coefficients one_plus(const BasisPtr& basis, const Coefficients& perturbation, double eps) {
  Coefficients c = eps * perturbation.resized(basis->band_limit());
  c(0, 0) += std::sqrt(kSphereArea);
  return c;
}

}  // namespace

Coefficients random_perturbation(std::uint64_t seed, std::size_t draw, int band_limit,
                                 double amplitude) {
  if (band_limit < 1) throw ConfigError("random_perturbation: band limit must be >= 1");
  if (!(amplitude >= 0)) throw ConfigError("random_perturbation: amplitude must be >= 0");
  auto rng = draw_engine(seed, draw);
  std::normal_distribution<double> normal(0.0, 1.0);
  Coefficients c(band_limit);
  c(0, 0) = std::sqrt(kSphereArea);
  for (int l = 1; l <= band_limit; ++l) {
    const double s = amplitude / ((1.0 + l) * (1.0 + l));
    for (int k = 0; k < (l + 1) * (l + 1); ++k) c(l, k) = s * normal(rng);
  }
  return c;
}

ScalarField sample_field(const BasisPtr& basis, const Coefficients& base,
                         const std::optional<MoebiusParam>& psi) {
  ScalarField u = ScalarField::from_coefficients(basis, base);
  if (psi) u = act(u, *psi, 4.0);
  return u;
}

SampleSet sample_feasible(const BasisPtr& basis, const SampleOptions& options) {
  if (!(options.amplitude >= 0)) throw ConfigError("sample_feasible: amplitude must be >= 0");
  if (options.band_limit < 1) throw ConfigError("sample_feasible: band limit must be >= 1");
  if (options.band_limit > basis->band_limit()) {
    throw ConfigError("sample_feasible: band limit exceeds the basis");
  }
  if (!(options.moebius_radius >= 0 && options.moebius_radius < 1)) {
    throw ConfigError("sample_feasible: moebius radius must lie in [0, 1)");
  }
  const double floor_rate = options.min_acceptance;
  const std::size_t cap = static_cast<std::size_t>(
      std::ceil(static_cast<double>(std::max<std::size_t>(options.count, 1)) / floor_rate));

  SampleSet set;
  std::size_t draw = 0;
  while (set.samples.size() < options.count) {
    const bool hopeless = set.attempts >= 1000 &&
                          static_cast<double>(set.samples.size()) < floor_rate * set.attempts;
    if (set.attempts >= cap || hopeless) {
      throw ConfigError("sample_feasible: acceptance rate below " +
                        std::to_string(100 * floor_rate) + "% after " +
                        std::to_string(set.attempts) +
                        " draws; reduce the amplitude or the band limit");
    }
    Sample s;
    s.draw = draw;
    s.base = random_perturbation(options.seed, draw, options.band_limit, options.amplitude)
                 .resized(basis->band_limit());
    if (options.moebius) {
      auto rng = draw_engine(options.seed ^ 0x9e3779b97f4a7c15ULL, draw);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Vec4 dir(normal(rng), normal(rng), normal(rng), normal(rng));
      s.psi = MoebiusParam(dir.normalized() * options.moebius_radius * unit(rng));
    }
    ++draw;
    ++set.attempts;
    s.field = sample_field(basis, s.base, s.psi);
    if (!s.field.strictly_positive(options.positivity)) continue;
    const auto sig = sigma1(s.field);
    const double smin = *std::min_element(sig.begin(), sig.end());
    if (!(smin > 0)) continue;
    s.sigma1_min = smin;
    set.samples.push_back(std::move(s));
  }
  set.acceptance_rate =
      set.attempts ? static_cast<double>(set.samples.size()) / set.attempts : 1.0;
  return set;
}

// ---------------------------------------------------------------------------

StabilityScan stability_scan(const std::vector<LabeledField>& samples,
                             const std::vector<double>& thetas,
                             const StabilityOptions& options) {
  struct Slot {
    std::vector<DeficitReport> reports;
    std::string skip;
    double deficit1 = 0;
    bool w14_pass = true;
  };
  std::vector<Slot> slots(samples.size());
  DistOptions dopt = options.dist;
  if (options.jobs > 1) dopt.jobs = 1;

  parallel_for(samples.size(), options.jobs, [&](std::size_t i) {
    const ScalarField& u = samples[i].field;
    Slot& slot = slots[i];
    FunctionalValues values;
    try {
      values = F2(u, options.deficit.positivity);
      require_feasible(values, options.deficit.positivity);
    } catch (const Error& e) {
      slot.skip = samples[i].id + ": " + e.what();
      return;
    }
    DeficitReport base;
    base.sample = i;
    base.field_id = samples[i].id;
    base.values = values;
    base.w14_l4 = w14_l4_diagnostic(u);
    base.exactness = u.grid()->exactness();
    base.seed = options.dist.seed;
    if (options.with_dist) {
      const DistWitness w = dist(u, dopt);
      base.dist_value = w.value;
      base.lambda_star = w.lambda_star;
      base.xi_star = w.xi_star;
      base.converged = w.converged;
      base.orthogonality = orthogonality_report(w.remainder);
    }
    slot.deficit1 = deficit_from_values(values, 1.0);
    slot.w14_pass = base.w14_l4.pass;
    for (double theta : thetas) {
      DeficitReport r = base;
      r.theta = theta;
      r.deficit = deficit_from_values(values, theta);
      if (options.with_dist) {
        if (r.dist_value > 1e-14) {
          r.ratio = r.deficit / r.dist_value;
        } else {
          r.at_optimizer = true;
        }
      }
      slot.reports.push_back(std::move(r));
    }
  });

  StabilityScan scan;
  auto& sum = scan.summary;
  for (double theta : thetas) {
    ThetaSummary t;
    t.theta = theta;
    t.min_deficit = INFINITY;
    sum.per_theta.push_back(t);
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    Slot& slot = slots[i];
    if (!slot.skip.empty()) {
      ++sum.skipped;
      sum.skip_reasons.push_back(slot.skip);
      continue;
    }
    ++sum.evaluated;
    if (slot.deficit1 < 1e-3 * f2_round()) {
      ++sum.near_minimizers;
      sum.near_minimizers_pass = sum.near_minimizers_pass && slot.w14_pass;
    }
    for (std::size_t j = 0; j < slot.reports.size(); ++j) {
      const DeficitReport& r = slot.reports[j];
      ThetaSummary& t = sum.per_theta[j];
      t.min_deficit = std::min(t.min_deficit, r.deficit);
      if (r.ratio) {
        ++t.ratios;
        if (!t.min_ratio || *r.ratio < *t.min_ratio) {
          t.min_ratio = *r.ratio;
          t.min_ratio_sample = i;
        }
      }
      scan.reports.push_back(r);
    }
  }
  for (auto& t : sum.per_theta) {
    if (!std::isfinite(t.min_deficit)) t.min_deficit = 0;
  }

  const ThetaSummary* t1 = nullptr;
  const ThetaSummary* t3 = nullptr;
  for (const auto& t : sum.per_theta) {
    if (t.theta == 1.0) t1 = &t;
    if (t.theta == 3.0) t3 = &t;
  }
  if (t1 && t3 && t1->min_ratio && t3->min_ratio) {
    sum.cross_check_available = true;
    sum.cross_check_lhs = *t3->min_ratio;
    sum.cross_check_rhs = *t1->min_ratio / (f1_round() * f1_round());
    sum.cross_check_ok = sum.cross_check_lhs >=
                         sum.cross_check_rhs -
                             options.cross_check_tol * std::max(1.0, std::abs(sum.cross_check_rhs));
  }
  return scan;
}

// ---------------------------------------------------------------------------

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ContractViolation("loglog_fit: need at least two (x, y) pairs");
  }
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw ContractViolation("loglog_fit: data must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0) throw ContractViolation("loglog_fit: x values must differ");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = n;
  return fit;
}

SharpnessTable sharpness_scan(const ScalarField& phi, std::vector<double> epsilons,
                              const SharpnessOptions& options) {
  if (!phi.coefficients() || !phi.basis()) {
    throw ContractViolation("sharpness_scan: phi must be band-limited");
  }
  const Coefficients& pc = *phi.coefficients();
  const double norm = pc.values().norm();
  if (std::abs(pc(0, 0)) > 1e-12 * std::max(norm, 1.0)) {
    throw ContractViolation("sharpness_scan: phi must have zero mean");
  }
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());

  SharpnessTable table;
  table.noise_floor = 64 * DBL_EPSILON * deficit_scale(options.theta);
  const double threshold = options.noise_multiple * table.noise_floor;

  for (double eps : epsilons) {
    SharpnessRow row;
    row.epsilon = eps;
    if (eps == 0) {
      table.rows.push_back(row);
      continue;
    }
    const ScalarField u = ScalarField::from_coefficients(phi.basis(), one_plus(phi.basis(), pc, eps));
    try {
      const FunctionalValues values = F2(u, options.deficit.positivity);
      require_feasible(values, options.deficit.positivity);
      row.deficit = deficit_from_values(values, options.theta);
    } catch (const Error& e) {
      row.feasible = false;
      row.note = e.what();
      table.rows.push_back(row);
      continue;
    }
    row.dist_value = dist(u, options.dist).value;
    if (row.dist_value > 1e-14) row.ratio = row.deficit / row.dist_value;
    table.rows.push_back(row);
  }

  std::vector<double> xs, ds, ts, rs;
  for (auto& row : table.rows) {
    if (xs.size() >= options.window) break;
    if (!row.feasible || row.epsilon <= 0) continue;
    if (row.deficit > threshold && row.dist_value > threshold) {
      row.in_window = true;
      xs.push_back(row.epsilon);
      ds.push_back(row.deficit);
      ts.push_back(row.dist_value);
      rs.push_back(*row.ratio);
    }
  }
  if (xs.size() >= 2) {
    table.deficit_fit = loglog_fit(xs, ds);
    table.dist_fit = loglog_fit(xs, ts);
  }
  if (!rs.empty()) {
    double mean = 0;
    for (double r : rs) mean += r;
    mean /= rs.size();
    const auto [lo, hi] = std::minmax_element(rs.begin(), rs.end());
    table.ratio_limit = mean;
    table.ratio_spread = (*hi - *lo) / std::abs(mean);
  }
  return table;
}

// ---------------------------------------------------------------------------

double hessian_formula(int degree) {
  return 16.0 * std::cbrt(kSphereArea) * (laplace_eigenvalue(degree) - 3.0);
}

HessianCheck hessian_check(int degree, const HessianOptions& options) {
  if (degree < 1) throw ConfigError("hessian_check: degree must be >= 1");
  if (options.k < 0 || options.k >= (degree + 1) * (degree + 1)) {
    throw ConfigError("hessian_check: k out of range for the degree");
  }
  const int exactness = options.exactness ? options.exactness : 4 * degree + 8;
  if (exactness < 4 * degree + 4) {
    throw ConfigError("hessian_check: exactness must be >= 4l + 4");
  }
  const auto basis = HarmonicBasis::build(degree, QuadratureGrid::build(exactness));
  Coefficients y(degree);
  y(degree, options.k) = 1.0;

  const double f2_one = F2(ScalarField::constant(basis, 1.0)).F2_of_u;
  auto g = [&](double eps) {
    const auto u = ScalarField::from_coefficients(basis, one_plus(basis, y, eps));
    return f2_one - F2(u).F2_of_u;
  };
  auto second = [&](double h) { return (g(h) + g(-h)) / (h * h); };

  HessianCheck out;
  out.degree = degree;
  out.formula_value = hessian_formula(degree);
  const double scale = hessian_formula(2) / 5.0;  // 16 |S^3|^{1/3}
  // Per-evaluation round-off of F2, propagated through the h/4 stencil.
  const double delta = 1e-14 * std::abs(f2_one);

  double h = options.step;
  for (;;) {
    const double round_off = (4.0 / 3.0) * 2.0 * delta / (h * h / 16.0);
    if (round_off <= options.resolution * scale || 2 * h > options.max_step) {
      const double d0 = second(h), d1 = second(h / 2), d2 = second(h / 4);
      const double r1 = (4 * d1 - d0) / 3;
      const double r2 = (4 * d2 - d1) / 3;
      out.fd_value = r2;
      out.noise = round_off + std::abs(r2 - r1);
      out.step = h;
      break;
    }
    h *= 2;
    ++out.widenings;
  }
  out.rel_err = out.formula_value != 0
                    ? std::abs(out.fd_value - out.formula_value) / std::abs(out.formula_value)
                    : std::abs(out.fd_value) / scale;
  return out;
}

}  // namespace s3conf
