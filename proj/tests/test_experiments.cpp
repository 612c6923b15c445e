#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "s3conf/errors.hpp"
#include "s3conf/experiments.hpp"
#include "s3conf/io.hpp"

using namespace s3conf;

TEST_CASE("sample_feasible: zero amplitude gives copies of 1") {
  const auto b = HarmonicBasis::build(2, QuadratureGrid::build(12));
  SampleOptions o;
  o.band_limit = 2;
  o.amplitude = 0;
  o.count = 3;
  const auto set = sample_feasible(b, o);
  REQUIRE(set.samples.size() == 3);
  CHECK(set.acceptance_rate == 1.0);
  for (const auto& s : set.samples) {
    CHECK(s.field.min_value() == doctest::Approx(1.0));
    CHECK(s.field.max_value() == doctest::Approx(1.0));
    CHECK(s.sigma1_min == doctest::Approx(3.0 / 32));
  }
}

TEST_CASE("sample_feasible: a = 0.05, L = 4, seed = 1") {
  const auto b = HarmonicBasis::build(4, QuadratureGrid::build(20));
  SampleOptions o;
  o.seed = 1;
  o.band_limit = 4;
  o.amplitude = 0.05;
  o.count = 10;
  const auto set = sample_feasible(b, o);
  REQUIRE(set.samples.size() == 10);
  for (const auto& s : set.samples) {
    CHECK(s.sigma1_min > 0);
    CHECK(s.field.strictly_positive());
  }
  // Same seed, same draws.
  const auto again = sample_feasible(b, o);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(again.samples[i].base.values() == set.samples[i].base.values());
  }
  o.seed = 2;
  CHECK(sample_feasible(b, o).samples[0].base.values() != set.samples[0].base.values());
}

TEST_CASE("sample_feasible: large amplitude aborts") {
  const auto b = HarmonicBasis::build(4, QuadratureGrid::build(20));
  SampleOptions o;
  o.band_limit = 4;
  o.amplitude = 10;
  o.count = 2;
  CHECK_THROWS_AS(sample_feasible(b, o), ConfigError);
}

TEST_CASE("feasibility survives serialization, with and without Moebius diversification") {
  const auto b = HarmonicBasis::build(3, QuadratureGrid::build(16));
  SampleOptions o;
  o.band_limit = 3;
  o.amplitude = 0.05;
  o.count = 6;
  o.moebius = true;
  const auto set = sample_feasible(b, o);
  for (const auto& s : set.samples) {
    REQUIRE(s.psi.has_value());
    Json j = to_json(s.base);
    j["moebius"] = to_json(*s.psi);
    const Json back = Json::parse(j.dump());
    const auto u = sample_field(b, coefficients_from_json(back), moebius_from_json(back["moebius"]));
    const auto v = F2(u);
    CHECK(v.feasible());
    CHECK(v.sigma1_min == doctest::Approx(s.sigma1_min).epsilon(1e-12));
  }
}

TEST_CASE("stability scan: equality cases") {
  const auto b = HarmonicBasis::build(1, QuadratureGrid::build(16));
  const auto one = ScalarField::constant(b, 1.0);
  const auto orbit = scale(act(one, MoebiusParam(Vec4(0.2, 0, -0.1, 0)), 4.0), 1.5);
  const auto scan = stability_scan({{"one", one}, {"orbit", orbit}}, {1.0, 3.0});
  REQUIRE(scan.reports.size() == 4);
  CHECK(scan.reports[0].at_optimizer);
  CHECK_FALSE(scan.reports[0].ratio.has_value());
  CHECK(std::abs(scan.reports[0].deficit) < 1e-12);
  for (const auto& r : scan.reports) {
    CHECK(std::abs(r.deficit) <= 1e-6 * f2_round());
    CHECK(r.dist_value <= 1e-6);
  }
  CHECK(scan.summary.evaluated == 2);
  CHECK(scan.summary.near_minimizers == 2);
  CHECK(scan.summary.near_minimizers_pass);
}

TEST_CASE("stability scan: ratios, cross-check and skipped samples") {
  const auto b = HarmonicBasis::build(2, QuadratureGrid::build(12));
  Coefficients c(2);
  c(0, 0) = std::sqrt(oracle::kArea);
  c(2, 3) = 0.05;
  Coefficients bad = c;
  bad(2, 3) = 0.6;
  const auto scan = stability_scan({{"good", ScalarField::from_coefficients(b, c)},
                                    {"bad", ScalarField::from_coefficients(b, bad)}},
                                   {0.0, 1.0, 3.0});
  CHECK(scan.summary.evaluated == 1);
  CHECK(scan.summary.skipped == 1);
  REQUIRE(scan.summary.skip_reasons.size() == 1);
  CHECK(scan.summary.skip_reasons[0].rfind("bad:", 0) == 0);
  for (const auto& t : scan.summary.per_theta) {
    REQUIRE(t.min_ratio.has_value());
    CHECK(*t.min_ratio > 0);
  }
  CHECK(scan.summary.cross_check_available);
  CHECK(scan.summary.cross_check_ok);
  CHECK(std::string(StabilitySummary::kLabel) == "observed lower estimate");
}

TEST_CASE("log-log fit") {
  const std::vector<double> x{1e-3, 1e-2, 1e-1};
  const std::vector<double> y{3e-6, 3e-4, 3e-2};
  const auto f = loglog_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_fit({1.0}, {1.0}), ContractViolation);
  CHECK_THROWS_AS(loglog_fit({1.0, 2.0}, {1.0, -1.0}), ContractViolation);
}

TEST_CASE("sharpness scan: Y2 direction, zero row, infeasible rows") {
  const auto b = HarmonicBasis::build(2, QuadratureGrid::build(12));
  Coefficients y(2);
  y(2, 0) = 1;
  const auto phi = ScalarField::from_coefficients(b, y);
  SharpnessOptions o;
  o.dist.restarts = 2;
  const auto t = sharpness_scan(phi, {0.0, 2e-3, 1e-3, 4e-3, 0.5}, o);
  REQUIRE(t.rows.size() == 5);
  CHECK(t.rows[0].epsilon == 0);
  CHECK(t.rows[0].deficit == 0);
  CHECK(t.rows[0].dist_value == 0);
  CHECK_FALSE(t.rows.back().feasible);
  CHECK_FALSE(t.rows.back().note.empty());
  REQUIRE(t.deficit_fit);
  REQUIRE(t.dist_fit);
  CHECK(t.deficit_fit->slope == doctest::Approx(2.0).epsilon(0.01));
  CHECK(t.dist_fit->slope == doctest::Approx(2.0).epsilon(0.01));
  // Leading coefficients: deficit ~ 8|S^3|^{1/3} 5 eps^2, dist ~ 9 eps^2.
  CHECK(*t.ratio_limit == doctest::Approx(8 * std::cbrt(oracle::kArea) * 5 / 9).epsilon(1e-2));
  CHECK(*t.ratio_spread < 0.1);

  Coefficients shifted = y;
  shifted(0, 0) = 0.5;
  CHECK_THROWS_AS(sharpness_scan(ScalarField::from_coefficients(b, shifted), {1e-3}), ContractViolation);
}

TEST_CASE("sharpness scan: degenerate Y1 direction") {
  const auto b = HarmonicBasis::build(1, QuadratureGrid::build(12));
  Coefficients y(1);
  y(1, 0) = 1;
  SharpnessOptions o;
  o.dist.restarts = 2;
  const auto t = sharpness_scan(ScalarField::from_coefficients(b, y), {1e-2, 2e-2, 4e-2}, o);
  REQUIRE(t.deficit_fit);
  CHECK(t.deficit_fit->slope > 2.5);
}

TEST_CASE("Hessian check") {
  CHECK(hessian_formula(2) == doctest::Approx(16 * std::cbrt(oracle::kArea) * 5));
  CHECK(hessian_formula(2) == doctest::Approx(216.2).epsilon(1e-3));
  CHECK(hessian_formula(3) == doctest::Approx(16 * std::cbrt(oracle::kArea) * 12));
  for (int l : {2, 3}) {
    const auto h = hessian_check(l);
    CHECK(h.rel_err < 1e-2);
    CHECK(h.step > 0);
  }
  const auto h1 = hessian_check(1);
  CHECK(h1.formula_value == 0);
  CHECK(std::abs(h1.fd_value) <= std::max(h1.noise, 1e-6));
  CHECK_THROWS_AS(hessian_check(0), ConfigError);
  HessianOptions low;
  low.exactness = 6;
  CHECK_THROWS_AS(hessian_check(2, low), ConfigError);
}
