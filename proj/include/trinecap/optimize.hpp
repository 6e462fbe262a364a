#pragma once

// One-dimensional search helpers on top of Boost.Math.

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

namespace trinecap {

struct Argmax {
  double arg;
  double value;
};

/// Maximizes f on [lo, hi]: coarse scan over `grid`+1 points (first maximum
/// wins, so ties go to the smaller argument), then Brent refinement inside
/// the neighbouring cells. The scanned optimum is kept if refinement does not
/// improve on it.
template <class F>
Argmax maximize_1d(F&& f, double lo, double hi, int grid = 64) {
  if (!(hi > lo) || grid < 2) throw std::invalid_argument("maximize_1d: bad bracket");
  const double h = (hi - lo) / grid;
  int best = 0;
  double best_v = f(lo);
  for (int k = 1; k <= grid; ++k) {
    const double v = f(lo + h * k);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  const double a = std::max(lo, lo + h * (best - 1));
  const double b = std::min(hi, lo + h * (best + 1));
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, a, b,
                                                       std::numeric_limits<double>::digits / 2, iters);
  if (-r.second > best_v) return {r.first, -r.second};
  return {lo + h * best, best_v};
}

/// Root of f in [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect_root(F&& f, double lo, double hi, double tol = 1e-12) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw std::domain_error("bisect_root: no sign change on bracket");
  std::uintmax_t iters = 400;
  auto r = boost::math::tools::bisect(f, lo, hi, [tol](double a, double b) { return std::abs(b - a) <= tol; },
                                      iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace trinecap
