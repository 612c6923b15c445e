#pragma once

#include <Eigen/Dense>
#include <numbers>

namespace s3conf {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// |S^3| = 2 pi^2, the total measure of the unit 3-sphere.
inline constexpr double kSphereArea = 2.0 * std::numbers::pi * std::numbers::pi;

}  // namespace s3conf
