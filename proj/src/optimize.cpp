#include "qkdrate/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qkdrate::optimize {

namespace {

const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace

Maximum golden_section_max(const std::function<double(double)>& f, double lo,
                           double hi, double tol) {
  if (hi < lo) std::swap(lo, hi);
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? Maximum{x1, f1} : Maximum{x2, f2};
}

Maximum grid_then_golden_max(const std::function<double(double)>& f, double lo,
                             double hi, std::size_t points, double tol) {
  points = std::max<std::size_t>(points, 3);
  std::vector<double> xs(points);
  std::vector<double> fs(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i < points; ++i) {
    xs[i] = i + 1 == points ? hi : lo + step * static_cast<double>(i);
    fs[i] = f(xs[i]);
    if (fs[i] > fs[best]) best = i;
  }
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[best + 1 == points ? best : best + 1];
  Maximum refined = golden_section_max(f, a, b, tol);
  if (refined.value > fs[best]) return refined;
  return {xs[best], fs[best]};
}

Maximum grid_then_golden_min(const std::function<double(double)>& f, double lo,
                             double hi, std::size_t points, double tol) {
  Maximum m = grid_then_golden_max([&](double x) { return -f(x); }, lo, hi,
                                   points, tol);
  return {m.x, -m.value};
}

}  // namespace qkdrate::optimize
