#pragma once

// Reference values computed without the library's grids or bases.

#include <array>
#include <cmath>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kArea = 2.0 * kPi * kPi;

// int_{S^3} w1^a1 w2^a2 w3^a3 w4^a4 = 2 prod Gamma((ai+1)/2) / Gamma((|a|+4)/2)
// for all ai even, 0 otherwise.
inline double monomial_moment(const std::array<int, 4>& a) {
  double num = 2.0;
  int total = 0;
  for (int e : a) {
    if (e % 2) return 0.0;
    num *= std::tgamma((e + 1) / 2.0);
    total += e;
  }
  return num / std::tgamma((total + 4) / 2.0);
}

inline double f1_round() { return 1.5 * std::pow(kArea, 2.0 / 3.0); }
inline double f2_round() { return 0.75 * std::pow(kArea, 4.0 / 3.0); }

}  // namespace oracle
