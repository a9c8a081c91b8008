#pragma once

#include <cstddef>
#include <functional>

namespace qkdrate::optimize {

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
Maximum golden_section_max(const std::function<double(double)>& f, double lo,
                           double hi, double tol);

/// Evaluates f on an evenly spaced grid of `points` nodes over [lo, hi], then
/// refines around the best node by golden-section search. The grid winner is
/// kept when the refinement does not improve on it, so the result is never
/// worse than any grid node.
Maximum grid_then_golden_max(const std::function<double(double)>& f, double lo,
                             double hi, std::size_t points, double tol);

/// Same as grid_then_golden_max but for minima.
Maximum grid_then_golden_min(const std::function<double(double)>& f, double lo,
                             double hi, std::size_t points, double tol);

}  // namespace qkdrate::optimize
