#pragma once

#include <optional>

#include "qkdrate/cv_keyrates.hpp"
#include "qkdrate/dv_channel.hpp"
#include "qkdrate/rates.hpp"

namespace qkdrate {

/// Free parameters shared by every protocol evaluation. Unset optionals mean
/// "optimize" or "use the default", as documented per field.
struct ProtocolSettings {
  /// Source variance. Unset: mu_max, unless optimize_va.
  std::optional<double> mu;
  bool optimize_va = false;
  double mu_max = kDefaultMuMax;
  /// NSqz-Hom trusted noise. Unset: optimized over [0, 100].
  std::optional<double> xi_b;
  /// Preprocessing flip probability. Unset: optimized over [0, 1/2].
  std::optional<double> q;
  NoisePlacement placement = NoisePlacement::AtOutput;
  /// Estimation phase variance added to the channel variance on the CV side.
  double v_phi = 0.0;
  /// Also add v_phi to the DV dephasing variance.
  bool dv_includes_v_phi = false;
};

KeyRateResult evaluate(Protocol protocol, const ProtocolSettings& settings,
                       const ThermalLossChannel& ch, const PhaseNoise& pn);

}  // namespace qkdrate
