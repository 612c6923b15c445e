#include "s3conf/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s3conf/errors.hpp"

namespace s3conf {

MoebiusParam::MoebiusParam(const Vec4& xi, std::optional<Mat4> rotation)
    : xi_(xi), rotation_(Mat4::Identity()) {
  if (!(xi.norm() < 1.0)) {
    throw ContractViolation("Moebius parameter needs |xi| < 1, got " + std::to_string(xi.norm()));
  }
  if (rotation) {
    const double defect = (rotation->transpose() * *rotation - Mat4::Identity()).cwiseAbs().maxCoeff();
    if (defect > 1e-12) {
      throw ContractViolation("rotation is not orthogonal (defect " + std::to_string(defect) + ")");
    }
    rotation_ = *rotation;
    has_rotation_ = true;
  }
}

MoebiusParam MoebiusParam::inverse() const {
  if (!has_rotation_) return MoebiusParam(-xi_);
  return MoebiusParam(-(rotation_ * xi_), Mat4(rotation_.transpose()));
}

namespace {

void check_unit(const Vec4& omega) {
  if (std::abs(omega.norm() - 1.0) > 1e-12) {
    throw ContractViolation("Moebius map applied to a point off the sphere (|w| = " +
                            std::to_string(omega.norm()) + ")");
  }
}

}  // namespace

Vec4 moebius_apply(const MoebiusParam& psi, const Vec4& omega) {
  check_unit(omega);
  const Vec4& xi = psi.xi();
  const double r2 = xi.squaredNorm();
  const double xw = xi.dot(omega);
  const double denom = 1.0 - 2.0 * xw + r2;
  Vec4 y = ((1.0 - r2) * omega - 2.0 * (1.0 - xw) * xi) / denom;
  y.normalize();
  return psi.has_rotation() ? Vec4(psi.rotation() * y) : y;
}

Vec4 moebius_apply_ball(const MoebiusParam& psi, const Vec4& x) {
  const Vec4& xi = psi.xi();
  const double r2 = xi.squaredNorm();
  const Vec4 d = x - xi;
  const double denom = 1.0 - 2.0 * xi.dot(x) + r2 * x.squaredNorm();
  const Vec4 y = ((1.0 - r2) * d - d.squaredNorm() * xi) / denom;
  return psi.rotation() * y;
}

double conformal_factor(const MoebiusParam& psi, const Vec4& omega) {
  const Vec4& xi = psi.xi();
  const double r2 = xi.squaredNorm();
  return (1.0 - r2) / (1.0 - 2.0 * xi.dot(omega) + r2);
}

MoebiusJet moebius_jet(const MoebiusParam& psi, const Vec4& omega) {
  const Vec4& xi = psi.xi();
  const double r2 = xi.squaredNorm();
  const double c = 1.0 - r2;
  const double xw = xi.dot(omega);
  const double d = 1.0 - 2.0 * xw + r2;

  MoebiusJet jet;
  const Vec4 num = c * omega - 2.0 * (1.0 - xw) * xi;
  Vec4 image = num / d;
  image.normalize();
  jet.image = psi.has_rotation() ? Vec4(psi.rotation() * image) : image;
  jet.k = c / d;

  // k = c / D with D(x) = 1 - 2 xi.x + |xi|^2: grad D = -2 xi, Hess D = 0.
  const Vec4 grad_amb = (2.0 * c / (d * d)) * xi;
  jet.grad_k = grad_amb - omega.dot(grad_amb) * omega;
  // Delta_S F = Delta F - w^T H w - 3 w.grad F on the unit sphere.
  jet.lap_k = 8.0 * c * (r2 - xw * xw) / (d * d * d) - 6.0 * c * xw / (d * d);

  Mat4 jac = (c * Mat4::Identity() + 2.0 * xi * xi.transpose()) / d +
             (2.0 / (d * d)) * num * xi.transpose();
  jet.jacobian = psi.has_rotation() ? Mat4(psi.rotation() * jac) : jac;
  return jet;
}

MoebiusParam compose(const MoebiusParam& outer, const MoebiusParam& inner) {
  // outer o inner = A' o Psi_{xi'} with xi' the preimage of the ball centre.
  const Vec4 centre = moebius_apply_ball(inner.inverse(),
                                         moebius_apply_ball(outer.inverse(), Vec4::Zero()));
  const MoebiusParam shift_back(-centre);
  Mat4 a;
  for (int i = 0; i < 4; ++i) {
    const Vec4 e = Vec4::Unit(i);
    a.col(i) = moebius_apply(outer, moebius_apply(inner, moebius_apply(shift_back, e)));
  }
  // Snap to the nearest orthogonal matrix.
  const Eigen::JacobiSVD<Mat4> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat4 rot = svd.matrixU() * svd.matrixV().transpose();
  return MoebiusParam(centre, rot);
}

double action_exponent(double q) {
  if (q == 0.0) throw ContractViolation("action exponent needs q != 0");
  return (3.0 - q) / (3.0 * q);
}

PulledBackSource::PulledBackSource(SourcePtr inner, MoebiusParam psi, double q)
    : inner_(std::move(inner)), psi_(std::move(psi)), q_(q) {
  if (!inner_) throw ContractViolation("PulledBackSource: null inner source");
  action_exponent(q_);
}

PointSamples PulledBackSource::evaluate(std::span<const Vec4> points, bool with_laplacian) const {
  const double m = 3.0 * action_exponent(q_);  // J^e = k^{3e}
  std::vector<MoebiusJet> jets(points.size());
  std::vector<Vec4> mapped(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    jets[i] = moebius_jet(psi_, points[i]);
    mapped[i] = jets[i].image;
  }
  const PointSamples g = inner_->evaluate(mapped, with_laplacian);

  PointSamples out;
  out.values.resize(points.size());
  out.gradients.resize(points.size());
  if (with_laplacian) out.laplacians.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec4& w = points[i];
    const MoebiusJet& jet = jets[i];
    const double k = jet.k;
    const double km = std::pow(k, m);
    const double km1 = km / k;
    // grad (g o Psi) = tangential part of J^T (grad g)(Psi w).
    Vec4 gc = jet.jacobian.transpose() * g.gradients[i];
    gc -= w.dot(gc) * w;
    out.values[i] = km * g.values[i];
    out.gradients[i] = m * km1 * g.values[i] * jet.grad_k + km * gc;
    if (with_laplacian) {
      const double kgrad2 = jet.grad_k.squaredNorm();
      const double lap_km = m * km1 * jet.lap_k + m * (m - 1.0) * (km1 / k) * kgrad2;
      // Psi is an isometry from k^2 g_* to g_*: conformal law in dimension 3.
      const double lap_gc = k * k * g.laplacians[i] - jet.grad_k.dot(gc) / k;
      out.laplacians[i] =
          lap_km * g.values[i] + km * lap_gc + 2.0 * m * km1 * jet.grad_k.dot(gc);
    }
  }
  return out;
}

ScalarField act(const ScalarField& f, const MoebiusParam& psi, double q, bool with_laplacian) {
  if (!f.evaluable()) {
    throw ContractViolation("act: the field has no coefficients or source to pull back");
  }
  return ScalarField::from_source(f.grid(), std::make_shared<PulledBackSource>(f.source(), psi, q),
                                  with_laplacian && f.has_laplacians());
}

double shell_log_k_jump(const QuadratureGrid& grid, const MoebiusParam& psi) {
  const auto [np, nt, nf] = grid.shape();
  std::vector<double> logk(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) logk[i] = std::log(conformal_factor(psi, grid.node(i)));
  double jump = 0.0;
  for (int a = 0; a < np; ++a) {
    for (int b = 0; b < nt; ++b) {
      for (int c = 0; c < nf; ++c) {
        const double here = logk[grid.index(a, b, c)];
        if (a + 1 < np) jump = std::max(jump, std::abs(here - logk[grid.index(a + 1, b, c)]));
        if (b + 1 < nt) jump = std::max(jump, std::abs(here - logk[grid.index(a, b + 1, c)]));
        jump = std::max(jump, std::abs(here - logk[grid.index(a, b, (c + 1) % nf)]));
      }
    }
  }
  return jump;
}

BlowupTable blowup_scan(const ScalarField& f, double q, double p,
                        const std::vector<double>& xi_magnitudes, const BlowupOptions& options) {
  if (!(q > 3.0)) throw ContractViolation("blowup_scan: needs q > 3");
  if (!(p >= 1.0)) throw ContractViolation("blowup_scan: needs p >= 1");
  if (!f.strictly_positive()) {
    throw DomainError("blowup_scan: field must be strictly positive", f.argmin());
  }
  const Vec4 dir = options.direction.normalized();
  BlowupTable table;
  for (double r : xi_magnitudes) {
    const MoebiusParam psi(r * dir);
    const ScalarField image = act(f, psi, q, false);
    BlowupRow row;
    row.xi_norm = r;
    row.lp_part = abs_power_integral(image, p);
    row.gradient_part = gradient_power_integral(image, p);
    row.norm = std::pow(row.lp_part + row.gradient_part, 1.0 / p);
    row.log_k_jump = shell_log_k_jump(*f.grid(), psi);
    row.under_resolved = row.log_k_jump > options.max_log_k_jump;
    table.rows.push_back(row);
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (!(table.rows[i].norm > table.rows[i - 1].norm)) table.monotone = false;
  }
  if (!table.rows.empty()) {
    const double top = *std::max_element(xi_magnitudes.begin(), xi_magnitudes.end());
    table.growth_checked = top >= 0.99;
    if (table.growth_checked) {
      table.growth_ok = table.rows.back().norm >= options.growth_factor * table.rows.front().norm;
    }
  }
  return table;
}

}  // namespace s3conf
