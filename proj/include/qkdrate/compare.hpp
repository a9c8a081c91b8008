#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qkdrate/dv_channel.hpp"
#include "qkdrate/protocols.hpp"
#include "qkdrate/rates.hpp"

namespace qkdrate {

inline constexpr double kFiberLossDbPerKm = 0.2;

/// Fibre link: eta = 10^(-attenuation * distance / 10).
class LinkModel {
 public:
  explicit LinkModel(double distance_km, double attenuation_db_per_km = kFiberLossDbPerKm);
  static LinkModel from_eta(double eta, double attenuation_db_per_km = kFiberLossDbPerKm);

  [[nodiscard]] double distance_km() const { return distance_km_; }
  [[nodiscard]] double attenuation_db_per_km() const { return attenuation_; }
  [[nodiscard]] double eta() const;

 private:
  double distance_km_;
  double attenuation_;
};

struct JitterSpec {
  double fwhm_s = 0.0;
  double rep_rate_hz = 1.0;

  [[nodiscard]] double pulse_spacing_s() const { return 1.0 / rep_rate_hz; }
  [[nodiscard]] bool exceeds_pulse_spacing() const { return fwhm_s >= pulse_spacing_s(); }
};

/// sigma^2 = (2 pi fwhm)^2 / (2 sqrt(2 ln 2) dt)^2.
PhaseNoise jitter_to_phase_noise(const JitterSpec& j);

/// (a - b) / max(a, b) on values >= 0. Empty when both are 0. Infinite values
/// compare as equal to each other and dominate finite ones.
std::optional<double> relative_difference(double a, double b);

/// K~ on clamped rates.
std::optional<double> relative_rate_advantage(const KeyRateResult& k_cv,
                                              const KeyRateResult& k_dv);

/// A protocol plus its settings, evaluated at a given channel.
struct RateModel {
  Protocol protocol = Protocol::SixState;
  ProtocolSettings settings;
  double attenuation_db_per_km = kFiberLossDbPerKm;

  [[nodiscard]] double rate(double distance_km, double n_th, double sigma2) const;
};

/// Comparison pair used by the maps: V_A-optimized Sqz-Hom against 6S.
RateModel default_cv_model();
RateModel default_dv_model();

inline constexpr double kFrontierRelTol = 1e-4;

/// Largest x >= 0 with rate(x) >= k0 for a rate non-increasing in x: doubling
/// bracket from `start`, then bisection to |rate - k0| <= 1e-4 k0. Returns 0
/// when rate(0) < k0 and +inf when rate(cap) is still >= k0. Throws
/// MonotonicityError when a sampled rate rises.
double find_frontier(const std::function<double(double)>& rate, double start, double cap,
                     double k0);

/// Largest N_th with rate >= k0. 0 when even N_th = 0 falls short; +inf when
/// the rate never drops to k0 (lossless link).
double max_tolerable_thermal_noise(const RateModel& model, double sigma2,
                                   double distance_km, double k0);

/// Largest distance with rate >= k0, mirror of max_tolerable_thermal_noise.
double max_distance(const RateModel& model, double sigma2, double n_th, double k0);

struct MapCell {
  double x = 0.0;
  double y = 0.0;
  double cv = 0.0;
  double dv = 0.0;
  std::optional<double> metric;
  std::string error;
};

/// Row-major over (x outer, y inner).
struct ComparisonMap {
  std::string x_name;
  std::string y_name;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<MapCell> cells;
};

/// Relative difference of tolerable N_th, x = sigma^2, y = distance.
ComparisonMap noise_frontier_map(const std::vector<double>& sigma2_grid,
                                 const std::vector<double>& distance_grid, double k0,
                                 const RateModel& cv = default_cv_model(),
                                 const RateModel& dv = default_dv_model());

/// Relative difference of maximum distance, x = sigma^2, y = N_th.
ComparisonMap loss_frontier_map(const std::vector<double>& sigma2_grid,
                                const std::vector<double>& n_grid, double k0,
                                const RateModel& cv = default_cv_model(),
                                const RateModel& dv = default_dv_model());

/// K~ over x = distance, y = N_th at fixed sigma^2. Rates below k0 count as 0.
ComparisonMap kmap(const std::vector<double>& distance_grid,
                   const std::vector<double>& n_grid, double sigma2, double k0,
                   const RateModel& cv = default_cv_model(),
                   const RateModel& dv = default_dv_model());

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace qkdrate
