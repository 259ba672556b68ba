// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

/// e^{-x} I_0(x) from the power series, summed in log space.
inline double scaled_bessel_i0(double x) {
  if (x == 0.0) return 1.0;
  const double lx = std::log(x / 2.0);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double lt = 2.0 * k * lx - 2.0 * std::lgamma(k + 1.0) - x;
    const double term = std::exp(lt);
    sum += term;
    if (k > x && term < 1e-20 * sum) break;
  }
  return sum;
}

/// Return probability of the rate-1 nearest-neighbour walk on Z^d.
inline double free_return(int d, double t) { return std::pow(scaled_bessel_i0(2.0 * t), d); }

/// sum_x p_t(0,x)^2 = p_{2t}(0,0) for the free walk.
inline double free_energy(int d, double t) { return free_return(d, 2.0 * t); }

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

inline double integrate_to_inf(const std::function<double(double)>& f, double a) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double s) { return f(a + s); }, 0.0, std::numeric_limits<double>::infinity());
}

/// Minimum of R^a r^a' A + r^-b B + R^-c D over a log2 grid with zoom refinement.
inline double grid_inf(double a, double ap, double b, double c, double A, double B, double D, double lo = -20,
                       double hi = 20, double step = 0.05) {
  const double lA = std::log(A), lB = std::log(B), lD = std::log(D);
  auto f = [&](double x, double y) {  // x = log2 r, y = log2 R
    const double l2 = std::log(2.0);
    return std::exp(a * y * l2 + ap * x * l2 + lA) + std::exp(-b * x * l2 + lB) + std::exp(-c * y * l2 + lD);
  };
  double bx = 0, by = 0, best = std::numeric_limits<double>::infinity();
  const int n = int(std::round((hi - lo) / step));
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = lo + step * i;
  // Separate the terms so each grid row costs O(n).
  std::vector<double> ry(n + 1), rr(n + 1), rD(n + 1);
  for (int j = 0; j <= n; ++j) {
    ry[j] = std::exp(a * grid[j] * std::log(2.0));
    rD[j] = std::exp(-c * grid[j] * std::log(2.0) + lD);
  }
  for (int i = 0; i <= n; ++i) {
    const double rx = std::exp(ap * grid[i] * std::log(2.0) + lA);
    const double tb = std::exp(-b * grid[i] * std::log(2.0) + lB);
    for (int j = 0; j <= n; ++j) {
      const double v = ry[j] * rx + tb + rD[j];
      if (v < best) best = v, bx = grid[i], by = grid[j];
    }
  }
  // Zoom around the coarse minimiser.
  double s = step;
  for (int round = 0; round < 30; ++round) {
    const double cx = bx, cy = by;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j) {
        const double x = cx + s * i / 5.0, y = cy + s * j / 5.0;
        const double v = f(x, y);
        if (v < best) best = v, bx = x, by = y;
      }
    s /= 4.0;
  }
  return best;
}

}  // namespace oracle
