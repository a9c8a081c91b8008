#pragma once

#include "qkdrate/scalar.hpp"

namespace qkdrate {

/// Beamsplitter of transmissivity eta mixing the signal with a thermal state of
/// mean photon number n_th. Both rails of the dual-rail encoding share it.
class ThermalLossChannel {
 public:
  ThermalLossChannel(double eta, double n_th);

  /// Builds the shared channel from per-rail parameters. Rails must match
  /// exactly; the QBER formulas assume identical, uncorrelated environments.
  static ThermalLossChannel dual_rail(double eta1, double n_th1, double eta2,
                                      double n_th2);

  [[nodiscard]] double eta() const { return eta_; }
  [[nodiscard]] double n_th() const { return n_th_; }
  /// gamma = 1 + N - N eta.
  [[nodiscard]] double gamma() const { return 1.0 + n_th_ - n_th_ * eta_; }
  /// No signal and no noise: every QBER is 0/0.
  [[nodiscard]] bool degenerate() const { return eta_ == 0.0 && n_th_ == 0.0; }

 private:
  double eta_;
  double n_th_;
};

/// Wrapped-normal phase noise, variance in rad^2.
class PhaseNoise {
 public:
  PhaseNoise() = default;
  explicit PhaseNoise(double variance);

  [[nodiscard]] double variance() const { return variance_; }

 private:
  double variance_ = 0.0;
};

/// Qubit-level statistics of the dual-rail channel.
struct DvChannelStats {
  double lambda = 0.0;
  double p_success = 1.0;
  Probability q_x;
  Probability q_y;
  Probability q_z;
  double gamma = 1.0;
};

double depolarizing_parameter(const ThermalLossChannel& ch);
Probability success_probability(const ThermalLossChannel& ch);
Probability thermal_qber(const ThermalLossChannel& ch);

/// Thermal loss followed by independent per-rail dephasing.
DvChannelStats combined_channel_stats(const ThermalLossChannel& ch,
                                      const PhaseNoise& pn = PhaseNoise{});

/// Statistics with an explicit QBER triple, for rate evaluation at QBERs that
/// do not come from a physical channel model (threshold searches).
DvChannelStats stats_from_qbers(double q_x, double q_y, double q_z,
                                double p_success = 1.0);

}  // namespace qkdrate
