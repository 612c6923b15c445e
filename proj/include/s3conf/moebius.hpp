#pragma once

#include <optional>
#include <vector>

#include "s3conf/field.hpp"
#include "s3conf/types.hpp"

namespace s3conf {

// Moebius transformation Psi = A o Psi_xi of S^3 with |xi| < 1 and A in O(4):
//   Psi_xi(w) = ((1 - |xi|^2) w - 2 (1 - xi.w) xi) / (1 - 2 xi.w + |xi|^2).
class MoebiusParam {
 public:
  MoebiusParam() : xi_(Vec4::Zero()), rotation_(Mat4::Identity()) {}
  // Throws ContractViolation if |xi| >= 1 or the rotation is not orthogonal
  // within 1e-12.
  explicit MoebiusParam(const Vec4& xi, std::optional<Mat4> rotation = std::nullopt);

  static MoebiusParam identity() { return MoebiusParam(); }

  const Vec4& xi() const { return xi_; }
  const Mat4& rotation() const { return rotation_; }
  bool has_rotation() const { return has_rotation_; }

  // Psi^{-1} = Psi_{-xi} o A^T, re-expressed as A^T o Psi_{-A xi}.
  MoebiusParam inverse() const;

 private:
  Vec4 xi_;
  Mat4 rotation_;
  bool has_rotation_ = false;
};

// Psi(omega); output renormalized to unit length. Throws ContractViolation
// when omega is off the sphere by more than 1e-12.
Vec4 moebius_apply(const MoebiusParam& psi, const Vec4& omega);

// Poincare extension of Psi to the closed unit ball.
Vec4 moebius_apply_ball(const MoebiusParam& psi, const Vec4& x);

// k(omega) = (1 - |xi|^2) / (1 - 2 xi.omega + |xi|^2) = J_Psi(omega)^{1/3}.
double conformal_factor(const MoebiusParam& psi, const Vec4& omega);

// Psi and the derivative data the pullbacks need at one point.
struct MoebiusJet {
  Vec4 image;
  double k = 1.0;
  Vec4 grad_k;      // tangential gradient of k
  double lap_k = 0; // Laplace-Beltrami of k
  Mat4 jacobian;    // ambient derivative of the defining formula, incl. A
};
MoebiusJet moebius_jet(const MoebiusParam& psi, const Vec4& omega);

// outer o inner as a single (xi, A) pair.
MoebiusParam compose(const MoebiusParam& outer, const MoebiusParam& inner);

// Exponent e(q) = (3 - q) / (3 q) of the Jacobian in (u)_{Psi,q} = J^{e(q)} u o Psi.
// e(2) = 1/6 acts on w (Yamabe normalization), e(4) = -1/12 on u.
double action_exponent(double q);

// Pullback source: J_Psi^{e(q)} (f o Psi) evaluated anywhere.
class PulledBackSource final : public FieldSource {
 public:
  PulledBackSource(SourcePtr inner, MoebiusParam psi, double q);
  PointSamples evaluate(std::span<const Vec4> points, bool with_laplacian) const override;

 private:
  SourcePtr inner_;
  MoebiusParam psi_;
  double q_;
};

// (f)_{Psi,q} on f's grid. Gradients come from the chain rule through the
// analytic Jacobian, Laplacians from the conformal transformation law.
// Throws ContractViolation if f cannot be evaluated off-grid or q == 0.
ScalarField act(const ScalarField& f, const MoebiusParam& psi, double q,
                bool with_laplacian = true);

// Largest |log k| jump between nodes adjacent in one of the three grid
// directions; large jumps mean the grid under-resolves the pullback.
double shell_log_k_jump(const QuadratureGrid& grid, const MoebiusParam& psi);

struct BlowupRow {
  double xi_norm = 0;
  double norm = 0;           // ||(f)_{Psi_xi}||_{W^{1,p}}
  double lp_part = 0;        // int |(f)_Psi|^p
  double gradient_part = 0;  // int |grad (f)_Psi|^p
  double log_k_jump = 0;
  bool under_resolved = false;
};

struct BlowupOptions {
  Vec4 direction = Vec4(1, 0, 0, 0);
  double growth_factor = 2.0;
  double max_log_k_jump = 2.0;
};

struct BlowupTable {
  std::vector<BlowupRow> rows;
  bool growth_checked = false;  // max |xi| >= 0.99
  bool growth_ok = true;        // last norm >= growth_factor * first norm
  bool monotone = true;
};

// Norms of (f)_{Psi_xi,q} along xi = r * direction. Requires f > 0, q > 3,
// p >= 1 (ContractViolation otherwise).
BlowupTable blowup_scan(const ScalarField& f, double q, double p,
                        const std::vector<double>& xi_magnitudes, const BlowupOptions& options = {});

}  // namespace s3conf
