#include "s3conf/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s3conf/errors.hpp"

namespace s3conf {

double f1_round() { return 1.5 * std::pow(kSphereArea, 2.0 / 3.0); }
double f2_round() { return 0.75 * std::pow(kSphereArea, 4.0 / 3.0); }

std::vector<double> sigma1(const ScalarField& u) {
  if (!u.has_laplacians()) {
    throw ContractViolation("sigma1: field carries no Laplacian samples");
  }
  std::vector<double> s(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u.value(i);
    s[i] = 0.25 * v * u.laplacians()[i] - 0.75 * u.gradient(i).squaredNorm() + (3.0 / 32.0) * v * v;
  }
  return s;
}

std::vector<double> sigma1_spectral(const ScalarField& u, const HarmonicBasis& doubled) {
  const ScalarField sq = mul(u, u);
  const Coefficients lap = laplacian(reanalyze(sq, doubled));
  const std::vector<double> lap_sq = doubled.synthesize(lap, u.grid()->nodes());
  std::vector<double> s(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u.value(i);
    s[i] = 0.125 * lap_sq[i] - u.gradient(i).squaredNorm() + (3.0 / 32.0) * v * v;
  }
  return s;
}

CurvatureDensities e2_density(const ScalarField& u) {
  CurvatureDensities d;
  d.sigma1 = sigma1(u);
  d.f.resize(u.size());
  d.e2.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u.value(i);
    const double g2 = u.gradient(i).squaredNorm();
    d.f[i] = 64.0 * (d.sigma1[i] + 0.5 * g2 + v * v / 32.0) * g2;
    d.e2[i] = 0.75 * v * v * v * v - d.f[i];
  }
  return d;
}

double F1(const ScalarField& w, const PositivityPolicy& policy) {
  if (!w.strictly_positive(policy)) {
    throw DomainError("F1: w must be strictly positive, min " + std::to_string(w.min_value()),
                      w.argmin());
  }
  std::vector<double> six(w.size());
  std::vector<double> energy(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w.value(i);
    const double v2 = v * v;
    six[i] = v2 * v2 * v2;
    energy[i] = w.gradient(i).squaredNorm() + 0.75 * v2;
  }
  const auto& grid = *w.grid();
  return 2.0 * grid.integrate(energy) / std::cbrt(grid.integrate(six));
}

FunctionalValues F2(const ScalarField& u, const PositivityPolicy& policy) {
  if (!u.strictly_positive(policy)) {
    throw DomainError("F2: u must be strictly positive, min " + std::to_string(u.min_value()),
                      u.argmin());
  }
  FunctionalValues out;
  out.u_argmin = u.argmin();
  out.u_min = u.value(out.u_argmin);
  const auto& grid = *u.grid();

  const CurvatureDensities d = e2_density(u);
  out.E2 = grid.integrate(d.e2);
  std::vector<double> inv(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) inv[i] = std::exp(-12.0 * std::log(u.value(i)));
  out.vol_norm = grid.integrate(inv);
  out.F2_of_u = std::cbrt(out.vol_norm) * out.E2;

  const auto smin = std::min_element(d.sigma1.begin(), d.sigma1.end());
  out.sigma1_min = *smin;
  out.sigma1_argmin = static_cast<std::size_t>(smin - d.sigma1.begin());
  out.f_min = *std::min_element(d.f.begin(), d.f.end());

  out.F1_of_w = F1(pow(u, -2.0, policy), policy);
  return out;
}

void require_feasible(const FunctionalValues& values, const PositivityPolicy& policy) {
  if (!(values.u_min > policy.strict_margin)) {
    throw FeasibilityError("u > 0", values.u_argmin, values.u_min);
  }
  if (!(values.sigma1_min > 0.0)) {
    throw FeasibilityError("sigma_1(u) > 0", values.sigma1_argmin, values.sigma1_min);
  }
}

double deficit_scale(double theta) { return std::abs(f2_round() * std::pow(f1_round(), 1.0 - theta)); }

double deficit_from_values(const FunctionalValues& values, double theta) {
  return f2_round() * std::pow(f1_round(), 1.0 - theta) -
         values.F2_of_u * std::pow(values.F1_of_w, 1.0 - theta);
}

double deficit(const ScalarField& u, double theta, const DeficitOptions& options) {
  if (!(theta >= 0.0)) throw ContractViolation("deficit: theta must be >= 0");
  const FunctionalValues values = F2(u, options.positivity);
  require_feasible(values, options.positivity);
  return deficit_from_values(values, theta);
}

double hessian_form(const ScalarField& r) {
  std::vector<double> sq(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) sq[i] = r.value(i) * r.value(i);
  return 8.0 * (r.gradient_energy() - 3.0 * r.grid()->integrate(sq));
}

double hessian_form_spectral(const Coefficients& c) {
  const auto energies = degree_energies(c);
  double q = 0.0;
  for (int l = 0; l < static_cast<int>(energies.size()); ++l) {
    q += (laplace_eigenvalue(l) - 3.0) * energies[l];
  }
  return 8.0 * q;
}

W14L4Diagnostic w14_l4_diagnostic(const ScalarField& u) {
  W14L4Diagnostic d;
  d.lhs = gradient_power_integral(u, 4.0);
  d.rhs = (3.0 / 128.0) * abs_power_integral(u, 4.0);
  d.pass = d.lhs <= d.rhs;
  return d;
}

}  // namespace s3conf
