#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "s3conf/distance.hpp"
#include "s3conf/errors.hpp"
#include "s3conf/experiments.hpp"
#include "s3conf/functionals.hpp"
#include "s3conf/io.hpp"
#include "s3conf/moebius.hpp"

namespace s3conf::cli {

namespace fs = std::filesystem;

namespace {

std::string theta_label(double t) {
  std::ostringstream s;
  s << t;
  return s.str();
}

int exactness_for(const RunConfig& cfg, int band_limit) {
  RunConfig c = cfg;
  c.band_limit = band_limit;
  return c.effective_exactness();
}

BasisPtr make_basis(int band_limit, int exactness, int max_exactness) {
  return HarmonicBasis::build(band_limit, QuadratureGrid::build(exactness, max_exactness));
}

DistOptions dist_options(const RunConfig& cfg) {
  DistOptions o;
  o.restarts = cfg.restarts;
  o.seed = cfg.seed;
  o.tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.max_exactness = cfg.max_exactness;
  o.jobs = cfg.jobs;
  return o;
}

class Run {
 public:
  Run(std::string sub, RunConfig cfg) : sub_(std::move(sub)), cfg_(std::move(cfg)) {
    dir_ = fs::path(cfg_.out) / (sub_ + "-" + config_hash(sub_, cfg_));
    fs::create_directories(dir_);
    start_ = std::chrono::steady_clock::now();
    manifest_["tool"] = "s3conf";
    manifest_["version"] = kVersion;
    manifest_["subcommand"] = sub_;
    Json config;
    for (const auto& [k, v] : cfg_.to_map()) config[k] = v;
    manifest_["config"] = std::move(config);
    manifest_["seed"] = cfg_.seed;
    manifest_["effective"] = Json::object();
    manifest_["outputs"] = Json::array();
  }

  const RunConfig& cfg() const { return cfg_; }
  Json& effective() { return manifest_["effective"]; }

  void record_grid(const QuadratureGrid& grid, int band_limit) {
    const auto shape = grid.shape();
    effective()["band_limit"] = band_limit;
    effective()["grid_exactness"] = grid.exactness();
    effective()["grid_nodes"] = grid.size();
    effective()["grid_shape"] = Json::array({shape[0], shape[1], shape[2]});
  }

  std::ofstream open(const std::string& name) {
    manifest_["outputs"].push_back(name);
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    return f;
  }

  void write_json(const std::string& name, const Json& j) { open(name) << j.dump(2) << "\n"; }

  int finish(int code) {
    manifest_["exit_code"] = code;
    manifest_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << manifest_.dump(2) << "\n";
    std::cout << "output: " << dir_.string() << "\n";
    return code;
  }

 private:
  std::string sub_;
  RunConfig cfg_;
  fs::path dir_;
  Json manifest_;
  std::chrono::steady_clock::time_point start_;
};

struct LoadedField {
  FieldSpec spec;
  BasisPtr basis;
  BuiltField built;
};

LoadedField load_field(Run& run, int exactness_override = 0) {
  const RunConfig& cfg = run.cfg();
  LoadedField lf;
  lf.spec = parse_field_spec(cfg.field);
  lf.spec.seed = cfg.seed;
  const int L = spec_band_limit(lf.spec, cfg.band_limit);
  int d = exactness_for(cfg, L);
  if (exactness_override) d = std::max(d, exactness_override);
  lf.basis = make_basis(L, d, cfg.max_exactness);
  lf.built = build_field(lf.spec, lf.basis);
  run.record_grid(*lf.basis->grid(), L);
  run.effective()["field_id"] = lf.spec.id();
  run.write_json("field.json", field_to_json(lf.built, lf.spec));
  return lf;
}

// ---------------------------------------------------------------------------

int grid_info(Run& run) {
  const int d = run.cfg().effective_exactness();
  const auto grid = QuadratureGrid::build(d, run.cfg().max_exactness);
  run.record_grid(*grid, run.cfg().band_limit);
  std::vector<double> one(grid->size(), 1.0);
  const double area = grid->integrate(one);
  const auto shape = grid->shape();
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"exactness", "nodes", "n_psi", "n_theta", "n_phi", "weight_sum",
                           "area_rel_err"});
  csv << d << grid->size() << shape[0] << shape[1] << shape[2] << area
      << std::abs(area - kSphereArea) / kSphereArea;
  csv.end_row();
  std::printf("exactness %d: %zu nodes (%d x %d x %d), weight sum %.15g\n", d, grid->size(),
              shape[0], shape[1], shape[2], area);
  return kExitOk;
}

int eval(Run& run) {
  const auto lf = load_field(run);
  const ScalarField& u = lf.built.field;
  const FunctionalValues v = F2(u);
  require_feasible(v);
  std::vector<std::string> header{"field_id", "F1", "F2", "E2", "vol_norm", "sigma1_min"};
  for (double t : run.cfg().thetas) header.push_back("deficit_theta_" + theta_label(t));
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, header);
  csv << lf.spec.id() << v.F1_of_w << v.F2_of_u << v.E2 << v.vol_norm << v.sigma1_min;
  Json deficits = Json::object();
  std::printf("field %s\n  F1[u^-2] = %.12g\n  F2[u]    = %.12g\n  sigma1_min = %.6g\n",
              lf.spec.id().c_str(), v.F1_of_w, v.F2_of_u, v.sigma1_min);
  for (double t : run.cfg().thetas) {
    const double d = deficit_from_values(v, t);
    csv << d;
    deficits[theta_label(t)] = d;
    std::printf("  deficit(theta=%s) = %.6g\n", theta_label(t).c_str(), d);
  }
  csv.end_row();
  run.write_json("values.json", Json{{"field_id", lf.spec.id()},
                                     {"values", to_json(v)},
                                     {"deficits", deficits},
                                     {"w14_l4", Json{{"lhs", w14_l4_diagnostic(u).lhs},
                                                     {"rhs", w14_l4_diagnostic(u).rhs}}}});
  return kExitOk;
}

int invariance(Run& run) {
  const auto lf = load_field(run, run.cfg().fine_exactness);
  const ScalarField& u = lf.built.field;
  const auto& x = run.cfg().xi;
  const MoebiusParam psi(Vec4(x[0], x[1], x[2], x[3]));
  const FunctionalValues before = F2(u);
  const FunctionalValues after = F2(act(u, psi, 4.0));
  const double e2 = std::abs(after.F2_of_u - before.F2_of_u) / std::abs(before.F2_of_u);
  const double e1 = std::abs(after.F1_of_w - before.F1_of_w) / std::abs(before.F1_of_w);
  const bool pass = e2 <= 1e-6 && e1 <= 1e-6;
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"field_id", "xi1", "xi2", "xi3", "xi4", "F2", "F2_pulled", "rel_err_F2",
                           "F1", "F1_pulled", "rel_err_F1", "pass"});
  csv << lf.spec.id() << x[0] << x[1] << x[2] << x[3] << before.F2_of_u << after.F2_of_u << e2
      << before.F1_of_w << after.F1_of_w << e1 << pass;
  csv.end_row();
  std::printf("F2: %.12g -> %.12g (rel %.3g)\nF1: %.12g -> %.12g (rel %.3g)\n%s\n",
              before.F2_of_u, after.F2_of_u, e2, before.F1_of_w, after.F1_of_w, e1,
              pass ? "invariant within 1e-6" : "NOT invariant within 1e-6");
  return kExitOk;
}

int dist_cmd(Run& run) {
  const auto lf = load_field(run);
  const DistWitness w = dist(lf.built.field, dist_options(run.cfg()));
  const OrthogonalityReport o = orthogonality_report(w.remainder);
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"field_id", "dist", "lambda_star", "xi1", "xi2", "xi3", "xi4",
                           "w12_part", "w14_part", "converged", "guard_triggered", "c0", "c1"});
  csv << lf.spec.id() << w.value << w.lambda_star << w.xi_star[0] << w.xi_star[1] << w.xi_star[2]
      << w.xi_star[3] << w.w12_part << w.w14_part << w.converged << w.guard_triggered << o.c0
      << o.c1;
  csv.end_row();
  Json j = to_json(w);
  j["field_id"] = lf.spec.id();
  j["orthogonality"] = Json{{"c0", o.c0}, {"c1", o.c1}};
  run.write_json("witness.json", j);
  std::printf("dist = %.12g  lambda* = %.10g  |xi*| = %.6g  converged = %s\n", w.value,
              w.lambda_star, w.xi_star.norm(), w.converged ? "yes" : "no");
  if (run.cfg().strict && !w.converged) return kExitNotConverged;
  return kExitOk;
}

int scan_stability(Run& run) {
  const RunConfig& cfg = run.cfg();
  const int L = std::max(cfg.band_limit, 1);
  const auto basis = make_basis(L, exactness_for(cfg, L), cfg.max_exactness);
  run.record_grid(*basis->grid(), L);
  SampleOptions so;
  so.seed = cfg.seed;
  so.band_limit = L;
  so.amplitude = cfg.amplitude;
  so.count = static_cast<std::size_t>(cfg.count);
  so.moebius = cfg.moebius;
  const SampleSet set = sample_feasible(basis, so);
  run.effective()["acceptance_rate"] = set.acceptance_rate;
  run.effective()["attempts"] = set.attempts;

  std::vector<LabeledField> fields;
  Json samples = Json::array();
  for (const auto& s : set.samples) {
    const std::string id = "random:" + format_double(cfg.amplitude) + "@" +
                           std::to_string(cfg.seed) + "#" + std::to_string(s.draw);
    fields.push_back({id, s.field});
    Json j = to_json(s.base);
    j["generator"] = Json{{"kind", "random"}, {"seed", cfg.seed}, {"amplitude", cfg.amplitude},
                          {"draw", s.draw}};
    if (s.psi) j["moebius"] = to_json(*s.psi);
    samples.push_back(std::move(j));
  }
  run.write_json("samples.json", samples);

  StabilityOptions opt;
  opt.dist = dist_options(cfg);
  opt.jobs = cfg.jobs;
  const StabilityScan scan = stability_scan(fields, cfg.thetas, opt);

  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"sample", "field_id", "theta", "deficit", "dist", "ratio",
                           "at_optimizer", "lambda_star", "xi_norm", "converged", "sigma1_min",
                           "w14_lhs", "w14_rhs", "w14_pass", "c0", "c1", "exactness", "seed"});
  bool all_converged = true;
  Json reports = Json::array();
  for (const auto& r : scan.reports) {
    csv << r.sample << r.field_id << r.theta << r.deficit << r.dist_value
        << (r.ratio ? *r.ratio : NAN) << r.at_optimizer << r.lambda_star << r.xi_star.norm()
        << r.converged << r.values.sigma1_min << r.w14_l4.lhs << r.w14_l4.rhs << r.w14_l4.pass
        << r.orthogonality.c0 << r.orthogonality.c1 << r.exactness
        << static_cast<long long>(r.seed);
    csv.end_row();
    all_converged = all_converged && r.converged;
    reports.push_back(to_json(r));
  }
  run.write_json("reports.json", reports);

  const auto& sum = scan.summary;
  Json per_theta = Json::array();
  std::printf("%zu samples (acceptance %.3f), %zu skipped\n", sum.evaluated, set.acceptance_rate,
              sum.skipped);
  for (const auto& t : sum.per_theta) {
    per_theta.push_back(Json{{"theta", t.theta},
                             {"min_ratio", t.min_ratio ? Json(*t.min_ratio) : Json(nullptr)},
                             {"min_ratio_label", StabilitySummary::kLabel},
                             {"min_ratio_sample", t.min_ratio_sample},
                             {"min_deficit", t.min_deficit},
                             {"ratios", t.ratios}});
    if (t.min_ratio) {
      std::printf("  theta=%s: min deficit/dist = %.6g (%s), min deficit = %.3g\n",
                  theta_label(t.theta).c_str(), *t.min_ratio, StabilitySummary::kLabel,
                  t.min_deficit);
    } else {
      std::printf("  theta=%s: no ratio (all samples at the optimizer), min deficit = %.3g\n",
                  theta_label(t.theta).c_str(), t.min_deficit);
    }
  }
  run.write_json("summary.json",
                 Json{{"per_theta", per_theta},
                      {"evaluated", sum.evaluated},
                      {"skipped", sum.skipped},
                      {"skip_reasons", sum.skip_reasons},
                      {"cross_check", Json{{"available", sum.cross_check_available},
                                           {"ok", sum.cross_check_ok},
                                           {"min_ratio_theta3", sum.cross_check_lhs},
                                           {"F1_round^-2_min_ratio_theta1", sum.cross_check_rhs}}},
                      {"near_minimizers", sum.near_minimizers},
                      {"near_minimizers_pass_w14_l4", sum.near_minimizers_pass},
                      {"note", "minimum ratios are observed lower estimates from sampling, not "
                               "bounds on the stability constants"}});
  if (sum.cross_check_available) {
    std::printf("  cross-check theta=3 vs F1[1]^-2 * theta=1: %.6g >= %.6g %s\n",
                sum.cross_check_lhs, sum.cross_check_rhs, sum.cross_check_ok ? "ok" : "FAILED");
  }
  if (cfg.strict && !all_converged) return kExitNotConverged;
  return kExitOk;
}

int scan_sharpness(Run& run) {
  const auto lf = load_field(run);
  SharpnessOptions opt;
  opt.dist = dist_options(run.cfg());
  const SharpnessTable table = sharpness_scan(lf.built.field, run.cfg().epsilons, opt);
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"epsilon", "feasible", "deficit", "dist", "ratio", "in_window", "note"});
  for (const auto& r : table.rows) {
    csv << r.epsilon << r.feasible << r.deficit << r.dist_value << (r.ratio ? *r.ratio : NAN)
        << r.in_window << r.note;
    csv.end_row();
    if (!r.feasible) std::printf("eps=%g dropped: %s\n", r.epsilon, r.note.c_str());
  }
  auto fit_json = [](const std::optional<SlopeFit>& f) {
    return f ? Json{{"slope", f->slope}, {"intercept", f->intercept}, {"points", f->points}}
             : Json(nullptr);
  };
  run.write_json("summary.json",
                 Json{{"field_id", lf.spec.id()},
                      {"noise_floor", table.noise_floor},
                      {"deficit_fit", fit_json(table.deficit_fit)},
                      {"dist_fit", fit_json(table.dist_fit)},
                      {"ratio_limit", table.ratio_limit ? Json(*table.ratio_limit) : Json(nullptr)},
                      {"ratio_spread",
                       table.ratio_spread ? Json(*table.ratio_spread) : Json(nullptr)}});
  if (table.deficit_fit && table.dist_fit) {
    std::printf("slopes: deficit %.4f, dist %.4f; deficit/dist -> %.6g (spread %.3g)\n",
                table.deficit_fit->slope, table.dist_fit->slope, *table.ratio_limit,
                *table.ratio_spread);
  } else {
    std::printf("fewer than two rows in the fit window; no slopes\n");
  }
  return kExitOk;
}

int hessian(Run& run) {
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"degree", "k", "fd_value", "formula_value", "rel_err", "noise", "step",
                           "widenings"});
  Json rows = Json::array();
  for (double dd : run.cfg().degrees) {
    HessianOptions opt;
    opt.exactness = run.cfg().grid_exactness;
    const HessianCheck h = hessian_check(static_cast<int>(dd), opt);
    csv << h.degree << opt.k << h.fd_value << h.formula_value << h.rel_err << h.noise << h.step
        << h.widenings;
    csv.end_row();
    rows.push_back(to_json(h));
    std::printf("l=%d: fd %.10g, formula %.10g, rel err %.3g (noise %.3g)\n", h.degree, h.fd_value,
                h.formula_value, h.rel_err, h.noise);
  }
  run.write_json("hessian.json", rows);
  return kExitOk;
}

int blowup(Run& run) {
  const auto lf = load_field(run, run.cfg().fine_exactness);
  const RunConfig& cfg = run.cfg();
  const BlowupTable t = blowup_scan(lf.built.field, cfg.q, cfg.p, cfg.xi_magnitudes);
  const bool closed = lf.spec.kind == "constant" && cfg.q == 4 && cfg.p == 4;
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"xi_norm", "norm", "lp_part", "gradient_part", "closed_form_lp",
                           "log_k_jump", "under_resolved"});
  for (const auto& r : t.rows) {
    const double c4 = std::pow(lf.spec.value, 4);
    const double cf = closed ? c4 * kSphereArea * (1 + r.xi_norm * r.xi_norm) /
                                   (1 - r.xi_norm * r.xi_norm)
                             : NAN;
    csv << r.xi_norm << r.norm << r.lp_part << r.gradient_part << cf << r.log_k_jump
        << r.under_resolved;
    csv.end_row();
    std::printf("|xi|=%g: W1,p norm %.10g, int |f|^p %.10g%s\n", r.xi_norm, r.norm, r.lp_part,
                r.under_resolved ? " (under-resolved)" : "");
  }
  run.write_json("summary.json", Json{{"monotone", t.monotone},
                                      {"growth_checked", t.growth_checked},
                                      {"growth_ok", t.growth_ok}});
  std::printf("monotone: %s\n", t.monotone ? "yes" : "no");
  return kExitOk;
}

int diagnose(Run& run) {
  const auto lf = load_field(run);
  const ScalarField& u = lf.built.field;
  const FunctionalValues v = F2(u);
  const W14L4Diagnostic w14 = w14_l4_diagnostic(u);
  const DistWitness w = dist(u, dist_options(run.cfg()));
  const OrthogonalityReport o = orthogonality_report(w.remainder);
  const Coefficients rc = reanalyze(w.remainder, *lf.basis);
  const FrequencySplit split = frequency_split(rc, run.cfg().l_cut);
  auto l2 = [](const Coefficients& c) { return c.values().norm(); };
  auto csv_file = run.open("results.csv");
  CsvWriter csv(csv_file, {"field_id", "sigma1_min", "feasible", "w14_lhs", "w14_rhs", "w14_pass",
                           "dist", "c0", "c1", "lo_l2", "med_l2", "hi_l2", "hi_empty"});
  csv << lf.spec.id() << v.sigma1_min << v.feasible() << w14.lhs << w14.rhs << w14.pass << w.value
      << o.c0 << o.c1 << l2(split.lo) << l2(split.med) << l2(split.hi) << split.hi_empty;
  csv.end_row();
  std::printf("sigma1_min %.6g (%s)\nint|grad u|^4 = %.6g vs (3/128) int u^4 = %.6g: %s\n"
              "dist %.6g, c0 %.4g, c1 %.4g\nremainder L2 by band: lo %.4g, med %.4g, hi %.4g%s\n",
              v.sigma1_min, v.feasible() ? "feasible" : "infeasible", w14.lhs, w14.rhs,
              w14.pass ? "pass" : "fail", w.value, o.c0, o.c1, l2(split.lo), l2(split.med),
              l2(split.hi), split.hi_empty ? " (l_cut >= band limit)" : "");
  if (run.cfg().strict && !w.converged) return kExitNotConverged;
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"grid-info",      "eval",    "invariance",
                                              "dist",           "scan-stability",
                                              "scan-sharpness", "hessian", "blowup",
                                              "diagnose"};
  return names;
}

std::string default_field(const std::string& subcommand) {
  if (subcommand == "scan-sharpness") return "hopf";
  if (subcommand == "dist") return "harmonic-bump";
  return "constant:1";
}

int run(const std::string& subcommand, RunConfig config) {
  if (config.field.empty()) config.field = default_field(subcommand);
  config.validate();
  Run r(subcommand, std::move(config));
  int code = kExitOk;
  if (subcommand == "grid-info") code = grid_info(r);
  else if (subcommand == "eval") code = eval(r);
  else if (subcommand == "invariance") code = invariance(r);
  else if (subcommand == "dist") code = dist_cmd(r);
  else if (subcommand == "scan-stability") code = scan_stability(r);
  else if (subcommand == "scan-sharpness") code = scan_sharpness(r);
  else if (subcommand == "hessian") code = hessian(r);
  else if (subcommand == "blowup") code = blowup(r);
  else if (subcommand == "diagnose") code = diagnose(r);
  else throw ConfigError("unknown subcommand '" + subcommand + "'");
  return r.finish(code);
}

}  // namespace s3conf::cli
