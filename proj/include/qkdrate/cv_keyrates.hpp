#pragma once

#include <cmath>
#include <optional>

#include "qkdrate/cv_covariance.hpp"
#include "qkdrate/dv_channel.hpp"
#include "qkdrate/rates.hpp"

namespace qkdrate {

/// Two-mode squeezed vacuum source of quadrature variance mu (vacuum = 1).
class CvSource {
 public:
  explicit CvSource(double mu);
  static CvSource from_squeezing_db(double db);
  /// Prepare-and-measure modulation variance V_A = mu - 1.
  static CvSource from_modulation(double v_a);

  [[nodiscard]] double mu() const { return mu_; }
  [[nodiscard]] double v_a() const { return mu_ - 1.0; }
  [[nodiscard]] double v_sq() const { return 1.0 / mu_; }
  [[nodiscard]] double v_sig() const { return (mu_ * mu_ - 1.0) / mu_; }
  [[nodiscard]] double squeezing_db() const { return 10.0 * std::log10(mu_); }

 private:
  double mu_;
};

inline constexpr double kDefaultMaxSqueezingDb = 15.0;
inline const double kDefaultMuMax = std::pow(10.0, kDefaultMaxSqueezingDb / 10.0);
inline constexpr double kTrustedNoiseMax = 100.0;

enum class NoisePlacement { AtOutput, AtInput };

struct CvExcessNoise {
  double epsilon_theta = 0.0;
  NoisePlacement placement = NoisePlacement::AtOutput;
};

/// eps = 2 V_A (1 - e^{-V/2}).
CvExcessNoise phase_excess_noise(const CvSource& src, const PhaseNoise& pn,
                                 NoisePlacement placement = NoisePlacement::AtOutput);

/// Total residual phase variance seen by the squeezing angle.
double combine_phase_variances(double v_phi, double v_theta);

CvCovariance build_covariance(const CvSource& src, const ThermalLossChannel& ch,
                              const CvExcessNoise& ex = {});

/// Pieces of a reverse-reconciliation rate K = I - (S(E) - S(E|B)).
struct HolevoTerms {
  double mutual_information = 0.0;
  double eve_entropy = 0.0;
  double eve_conditional_entropy = 0.0;

  [[nodiscard]] double holevo() const { return eve_entropy - eve_conditional_entropy; }
  [[nodiscard]] double key_rate() const { return mutual_information - holevo(); }
};

HolevoTerms sqz_hom_terms(const CvCovariance& cov);
HolevoTerms trusted_noise_terms(const CvCovariance& cov, double xi_b);
HolevoTerms gg02_terms(const CvCovariance& cov);

KeyRateResult sqz_hom_rate(const CvCovariance& cov);
KeyRateResult sqz_hom_trusted_noise_rate(const CvCovariance& cov, double xi_b);
/// Maximizes over xi_b in [0, xi_max]; optimal_param holds the maximizer.
KeyRateResult optimize_trusted_noise(const CvCovariance& cov,
                                     double xi_max = kTrustedNoiseMax);
KeyRateResult gg02_heterodyne_rate(const CvSource& src, const ThermalLossChannel& ch,
                                   const CvExcessNoise& ex = {});

/// Maximizes a CV protocol's rate over mu in [1, mu_max], recomputing the phase
/// excess noise at every trial mu. optimal_param holds V_A = mu - 1.
KeyRateResult optimize_modulation(Protocol protocol, const ThermalLossChannel& ch,
                                  const PhaseNoise& pn, double mu_max = kDefaultMuMax,
                                  NoisePlacement placement = NoisePlacement::AtOutput,
                                  std::optional<double> fixed_xi = std::nullopt);

/// Rate of a CV protocol at a fixed source. NSqz-Hom optimizes xi_b unless
/// `fixed_xi` is given.
KeyRateResult cv_rate_at(Protocol protocol, const CvSource& src,
                         const ThermalLossChannel& ch, const PhaseNoise& pn,
                         NoisePlacement placement = NoisePlacement::AtOutput,
                         std::optional<double> fixed_xi = std::nullopt);

}  // namespace qkdrate
