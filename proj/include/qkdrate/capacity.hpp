#pragma once

#include <optional>

#include "qkdrate/dv_channel.hpp"
#include "qkdrate/rates.hpp"

namespace qkdrate {

/// Lower and upper bounds on the repeaterless secret-key capacity of a
/// thermal-loss channel, bits per use. At eta = 1 both are +infinity.
struct CapacityBounds {
  double lower = 0.0;
  std::optional<double> upper;
  bool entanglement_breaking = false;
};

[[nodiscard]] bool is_entanglement_breaking(const ThermalLossChannel& ch);

CapacityBounds plob_bounds(const ThermalLossChannel& ch);

/// Clamped rate divided by the upper bound. Throws
/// NormalizationUnavailableError when no positive upper bound exists.
double normalize_rate(const KeyRateResult& k, const CapacityBounds& bounds);

}  // namespace qkdrate
