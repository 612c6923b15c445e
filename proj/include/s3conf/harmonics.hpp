#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "s3conf/quadrature.hpp"
#include "s3conf/types.hpp"

namespace s3conf {

// Coefficients in the real hyperspherical harmonic basis, block ordered by
// degree: entry index(l, k) for 0 <= k < (l+1)^2. Within a degree,
// k = m^2 + (n + m) for 0 <= m <= l and -m <= n <= m, where m is the
// S^2 sub-degree and n the azimuthal order (n < 0 selects sin(|n| phi)).
class Coefficients {
 public:
  Coefficients() = default;
  explicit Coefficients(int band_limit);
  Coefficients(int band_limit, Eigen::VectorXd values);

  static std::size_t dimension(int band_limit);
  static std::size_t index(int degree, int k);
  static int degree_of(std::size_t index);

  int band_limit() const { return band_limit_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator()(int degree, int k) const { return values_[index(degree, k)]; }
  double& operator()(int degree, int k) { return values_[index(degree, k)]; }

  // Zero-pads or truncates to a new band limit.
  Coefficients resized(int band_limit) const;

  Coefficients& operator+=(const Coefficients& other);
  Coefficients& operator*=(double s);

 private:
  int band_limit_ = 0;
  Eigen::VectorXd values_;
};

Coefficients operator+(Coefficients a, const Coefficients& b);
Coefficients operator*(double s, Coefficients a);

// -Delta Y = l(l+2) Y on S^3.
inline double laplace_eigenvalue(int degree) { return degree * (degree + 2.0); }

// Multiplies the degree-l block by -l(l+2).
Coefficients laplacian(const Coefficients& c);

// Keeps only the listed degrees.
Coefficients project(const Coefficients& c, const std::set<int>& degrees);

// Squared L2 norm of each degree block (Parseval).
std::vector<double> degree_energies(const Coefficients& c);

// Values, tangential gradients and Laplacians of a field at a set of points.
struct PointSamples {
  std::vector<double> values;
  std::vector<Vec4> gradients;
  std::vector<double> laplacians;

  std::size_t size() const { return values.size(); }
};

// Orthonormal real harmonics on S^3 up to a band limit. Each basis function is
// the restriction of a homogeneous harmonic polynomial on R^4 (Gegenbauer
// product in hyperspherical angles), orthonormalized degree by degree against
// a canonical grid of exactness 2l. Values on an attached grid are cached.
class HarmonicBasis {
 public:
  static std::shared_ptr<const HarmonicBasis> build(int band_limit, GridPtr grid);

  int band_limit() const { return band_limit_; }
  std::size_t size() const { return Coefficients::dimension(band_limit_); }
  const GridPtr& grid() const { return grid_; }

  // size() x grid()->size() table of basis values at the grid nodes.
  const Eigen::MatrixXd& node_values() const { return node_values_; }

  // c_k = int f Y_k by quadrature. Throws ConfigError if the grid exactness
  // is below 2 * band_limit, ContractViolation on a length mismatch.
  Coefficients analyze(std::span<const double> values) const;

  // Point values of sum_k c_k Y_k. Throws ContractViolation for a point off
  // the sphere by more than 1e-12 or for coefficients above the band limit.
  std::vector<double> synthesize(const Coefficients& c, std::span<const Vec4> points) const;

  // Values plus tangential gradients (and Laplacians when requested).
  PointSamples evaluate(const Coefficients& c, std::span<const Vec4> points,
                        bool with_laplacian = true) const;

  // Tangential gradient of a single basis function at the grid nodes.
  std::vector<Vec4> basis_gradient(std::size_t index) const;

 private:
  struct DegreeTable {
    int degree = 0;
    // Exponents of the degree-l monomials, one row per monomial.
    std::vector<std::array<int, 4>> exponents;
    // (l+1)^2 x n_monomials; row j is basis function j of this degree.
    Eigen::MatrixXd poly;
  };

  HarmonicBasis() = default;
  void fill_monomials(int degree, const std::array<std::vector<double>, 4>& powers,
                      Eigen::VectorXd& out) const;

  int band_limit_ = 0;
  GridPtr grid_;
  std::vector<DegreeTable> degrees_;
  // Lookup (a, b, c) -> monomial index within its degree, d = l - a - b - c.
  std::vector<std::vector<int>> lookup_;
  Eigen::MatrixXd node_values_;

};

using BasisPtr = std::shared_ptr<const HarmonicBasis>;

}  // namespace s3conf
