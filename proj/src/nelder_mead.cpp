#include "s3conf/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace s3conf {

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;

  NelderMeadResult result;
  std::vector<double> fx(n + 1);
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n);
  auto point = [&](double t, const std::vector<double>& worst) {
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (worst[j] - centroid[j]);
    return p;
  };

  double last_best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        s2[i] = simplex[order[i]];
        f2[i] = fx[order[i]];
      }
      simplex.swap(s2);
      fx.swap(f2);
    }

    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(simplex[i][j] - simplex[0][j]));
      diameter = std::max(diameter, d);
    }
    if (diameter < options.diameter_tol) {
      result.converged = true;
      break;
    }
    if (last_best - fx[0] < options.stall_tol) {
      if (++stalled >= options.stall_window) {
        result.converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
    last_best = std::min(last_best, fx[0]);

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    const auto& worst = simplex[n];
    const auto xr = point(-1.0, worst);
    const double fr = eval(xr);
    if (fr < fx[0]) {
      const auto xe = point(-2.0, worst);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fx[n] = fe;
      } else {
        simplex[n] = xr;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      simplex[n] = xr;
      fx[n] = fr;
    } else {
      const bool outside = fr < fx[n];
      const auto xc = outside ? point(-0.5, worst) : point(0.5, worst);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fx[n])) {
        simplex[n] = xc;
        fx[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          }
          fx[i] = eval(simplex[i]);
        }
      }
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  result.x = simplex[best];
  result.value = fx[best];
  result.iterations = iter;
  return result;
}

}  // namespace s3conf
