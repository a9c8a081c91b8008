#pragma once

// Truncated Fock-space simulation of the dual-rail thermal-loss channel. Each
// rail is a beamsplitter a -> sqrt(eta) b + sqrt(1-eta) f mixing the signal
// with its own thermal environment; Bob keeps b, the environment keeps f.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "qkdrate/dv_channel.hpp"

namespace qkdrate {

inline constexpr double kFockTailBound = 1e-8;
inline constexpr double kDefaultCutoffMargin = 20.0;

/// n_max = ceil(40 N + margin).
int default_cutoff(double n_th, double margin = kDefaultCutoffMargin);

/// Thermal probability mass above n_max, (N/(N+1))^(n_max+1).
double thermal_tail_mass(double n_th, int cutoff);

/// Beamsplitter restricted to total photon number `total`. Entry (j, m) is the
/// amplitude of |j>_b |total-j>_f given |m>_a |total-m>_e. Only the first
/// `columns` columns are built (all of them when columns < 0).
Eigen::MatrixXd beamsplitter_block(double eta, int total, int columns = -1);

/// One rail: thermal weights and the amplitudes needed for 0/1-photon inputs.
class FockRail {
 public:
  FockRail(const ThermalLossChannel& ch, std::optional<int> cutoff = std::nullopt);

  [[nodiscard]] int cutoff() const { return cutoff_; }
  [[nodiscard]] const std::vector<double>& thermal_weights() const { return weights_; }
  [[nodiscard]] double tail_mass() const { return tail_; }

  /// <j|_b <i+n-j|_f U |i>_a |n>_e for i in {0, 1}; zero when j > i + n.
  [[nodiscard]] double amplitude(int i, int n, int j) const;

  /// sum_n p_n <i+n-j| ... amplitude products with matching environment output.
  /// Requires i - j == i2 - j2; otherwise the environment states are orthogonal.
  [[nodiscard]] double transfer(int i, int j, int i2, int j2) const;

 private:
  int cutoff_;
  double tail_;
  std::vector<double> weights_;
  std::vector<Eigen::MatrixXd> blocks_;  // index total photon number
};

struct RailProbabilities {
  /// p[i][j] = P(|i>_a -> |j>_b).
  std::array<std::array<double, 2>, 2> p{};
  double p_success = 0.0;
  double q_z = 0.0;
  double lambda = 0.0;
};

RailProbabilities oracle_rail_probabilities(const ThermalLossChannel& ch,
                                            std::optional<int> cutoff = std::nullopt);

/// E[e^{i theta}] for wrapped-normal theta, by periodic trapezoid quadrature.
std::complex<double> wrapped_normal_phase_average(double variance);

/// Un-normalized qubit map on the single-photon subspace. Logical |0> is the
/// photon in rail 1. image[I][J] is the output for input |I><J|.
struct QubitMap {
  std::array<std::array<Eigen::Matrix2cd, 2>, 2> image;

  [[nodiscard]] Eigen::Matrix2cd apply(const Eigen::Matrix2cd& rho) const;
  [[nodiscard]] double success_probability() const;
  /// Choi matrix of the map divided by its success probability.
  [[nodiscard]] Eigen::Matrix4cd normalized_choi() const;
  /// Error rates of the normalized map in the three Pauli bases.
  [[nodiscard]] double qber_z() const;
  [[nodiscard]] double qber_x() const;
  [[nodiscard]] double qber_y() const;
  /// 1 - lambda, read off the coherence the map preserves.
  [[nodiscard]] double coherence_factor() const;
};

QubitMap oracle_qubit_channel(const ThermalLossChannel& ch, const PhaseNoise& pn = {},
                              std::optional<int> cutoff = std::nullopt);

/// Both rails plus a 50:50 recombining beamsplitter, fed (|10> + |01>)/sqrt 2.
/// Returns the probability that the accepted photon exits the wrong port.
double oracle_x_basis_qber(const ThermalLossChannel& ch,
                           std::optional<int> cutoff = std::nullopt);

struct OracleDeviation {
  double q_z = 0.0;
  double q_x = 0.0;
  double p_success = 0.0;
  double lambda = 0.0;
  double x_basis = 0.0;
  double choi_min_eigenvalue = 0.0;
  int cells = 0;

  [[nodiscard]] double max() const;
};

/// Closed forms against the oracle over an (eta, N, sigma^2) grid. The X-basis
/// beamsplitter simulation runs only on sigma^2 = 0 cells.
OracleDeviation oracle_check(const std::vector<double>& etas,
                             const std::vector<double>& n_ths,
                             const std::vector<double>& variances);

}  // namespace qkdrate
