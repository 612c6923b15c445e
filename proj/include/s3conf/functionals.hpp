#pragma once

#include <cstddef>
#include <vector>

#include "s3conf/field.hpp"

namespace s3conf {

// Closed forms at the round metric: F1[1] = (3/2)|S^3|^{2/3},
// F2[1] = (3/4)|S^3|^{4/3}; F1[1]^2 = 3 F2[1].
double f1_round();
double f2_round();

// sigma_1(u) = (1/8) Delta(u^2) - |grad u|^2 + (3/32) u^2, evaluated in the
// product-rule form (1/4) u Delta u - (3/4)|grad u|^2 + (3/32) u^2.
// Throws ContractViolation when u carries no Laplacian samples.
std::vector<double> sigma1(const ScalarField& u);

// Same density through the spectral Laplacian of u^2 re-expanded with
// `doubled` (band limit >= 2L, sharing u's grid). Cross-check only.
std::vector<double> sigma1_spectral(const ScalarField& u, const HarmonicBasis& doubled);

struct CurvatureDensities {
  std::vector<double> sigma1;
  // f = 64 (sigma_1 + |grad u|^2 / 2 + u^2 / 32) |grad u|^2
  std::vector<double> f;
  // e_2 = (3/4) u^4 - f
  std::vector<double> e2;
};
CurvatureDensities e2_density(const ScalarField& u);

// F1[w] = 2 (int w^6)^{-1/3} int (|grad w|^2 + (3/4) w^2). Throws
// DomainError if w is not strictly positive.
double F1(const ScalarField& w, const PositivityPolicy& policy = {});

struct FunctionalValues {
  double F1_of_w = 0;  // F1[u^{-2}]
  double F2_of_u = 0;
  double E2 = 0;        // int e_2(u)
  double vol_norm = 0;  // int u^{-12}
  double sigma1_min = 0;
  std::size_t sigma1_argmin = 0;
  double f_min = 0;
  double u_min = 0;
  std::size_t u_argmin = 0;
  bool feasible() const { return u_min > 0 && sigma1_min > 0; }
};

// F2[u] = (int u^{-12})^{1/3} int e_2(u), plus the companion values.
// Throws DomainError when u is not strictly positive; sigma_1 > 0 is only
// reported.
FunctionalValues F2(const ScalarField& u, const PositivityPolicy& policy = {});

// Throws FeasibilityError naming the violated constraint and worst node.
void require_feasible(const FunctionalValues& values, const PositivityPolicy& policy = {});

struct DeficitOptions {
  // Slack for "deficit >= 0", relative to F2[1] F1[1]^{1-theta}.
  double slack = 1e-8;
  PositivityPolicy positivity;
};

// F2[1] F1[1]^{1-theta} - F2[u] F1[u^{-2}]^{1-theta}. theta = 1 is the
// reverse sigma_2 inequality, theta = 3 the ADT form, theta = 0 the
// sigma_2-sigma_1 form.
double deficit(const ScalarField& u, double theta, const DeficitOptions& options = {});
double deficit_from_values(const FunctionalValues& values, double theta);
// Scale |F2[1] F1[1]^{1-theta}| used for relative slack.
double deficit_scale(double theta);

// Q(r) = 8 (||grad r||_2^2 - 3 ||r||_2^2) by quadrature.
double hessian_form(const ScalarField& r);
// Q via 8 sum_l (l(l+2) - 3) ||Pi_l r||_2^2.
double hessian_form_spectral(const Coefficients& c);

struct W14L4Diagnostic {
  double lhs = 0;  // int |grad u|^4
  double rhs = 0;  // (3/128) int u^4
  bool pass = false;
};
W14L4Diagnostic w14_l4_diagnostic(const ScalarField& u);

}  // namespace s3conf
