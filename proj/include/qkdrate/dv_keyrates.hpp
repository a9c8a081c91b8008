#pragma once

#include <optional>

#include "qkdrate/dv_channel.hpp"
#include "qkdrate/rates.hpp"

namespace qkdrate {

/// Bell-diagonal weights of the shared two-qubit state. lam01 is the weight of
/// a phase flip, lam10 of a bit flip and lam11 of both.
struct SixStateDecomposition {
  double lam00 = 1.0;
  double lam01 = 0.0;
  double lam10 = 0.0;
  double lam11 = 0.0;

  /// Throws UnphysicalQberError when any weight is negative or the weights do
  /// not sum to 1.
  void validate() const;
};

SixStateDecomposition six_state_decomposition(const DvChannelStats& stats);

/// Devetak-Winter key fraction S(X'|E) - H(X'|Y) for Z-basis key bits when
/// Alice flips her raw bit with probability q before error correction and Eve
/// holds the purification of the Bell-diagonal state. At q = 0 it equals
/// 1 - sum_ij H(lam_ij).
double preprocessed_key_fraction(const SixStateDecomposition& lam, double q);

/// Worst case of preprocessed_key_fraction over Bell-diagonal states with the
/// observed Q_X and Q_Z (Q_Y unconstrained).
double bb84_preprocessed_key_fraction(double q_x, double q_z, double q);

KeyRateResult bb84_rate(const DvChannelStats& stats);
KeyRateResult six_state_rate(const DvChannelStats& stats);

/// Noisy-preprocessing BB84. Optimizes q on [0, 1/2] unless `fixed_q` is set.
KeyRateResult bb84_noisy_rate(const DvChannelStats& stats,
                              std::optional<double> fixed_q = std::nullopt);

/// Noisy-preprocessing six-state. Optimizes q on [0, 1/2] unless `fixed_q` is
/// set.
KeyRateResult six_state_noisy_rate(const DvChannelStats& stats,
                                   std::optional<double> fixed_q = std::nullopt);

}  // namespace qkdrate
