#include "qkdrate/capacity.hpp"

#include <cmath>
#include <limits>

#include "qkdrate/errors.hpp"
#include "qkdrate/scalar.hpp"

namespace qkdrate {

bool is_entanglement_breaking(const ThermalLossChannel& ch) {
  const double eta = ch.eta();
  if (eta >= 1.0) return false;
  return ch.n_th() >= eta / (1.0 - eta);
}

CapacityBounds plob_bounds(const ThermalLossChannel& ch) {
  const double eta = ch.eta();
  const double n = ch.n_th();
  CapacityBounds out;
  out.entanglement_breaking = is_entanglement_breaking(ch);
  if (eta >= 1.0) {
    out.lower = std::numeric_limits<double>::infinity();
    out.upper = out.lower;
    return out;
  }
  const double g = bosonic_entropy(n);
  out.lower = -std::log2(1.0 - eta) - g;
  if (!out.entanglement_breaking) {
    out.upper = n == 0.0 ? out.lower : out.lower - n * std::log2(eta);
  }
  return out;
}

double normalize_rate(const KeyRateResult& k, const CapacityBounds& bounds) {
  if (!bounds.upper || !(*bounds.upper > 0.0)) {
    throw NormalizationUnavailableError(
        "no positive upper bound: channel is entanglement-breaking");
  }
  return k.rate / *bounds.upper;
}

}  // namespace qkdrate
