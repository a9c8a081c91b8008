#include "qkdrate/dv_keyrates.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "qkdrate/errors.hpp"
#include "qkdrate/optimize.hpp"
#include "qkdrate/scalar.hpp"

namespace qkdrate {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using cd = std::complex<double>;

constexpr double kWeightSlack = 1e-12;
constexpr double kQMax = 0.5;
constexpr std::size_t kQGridPoints = 64;
constexpr double kQTolerance = 1e-6;
constexpr std::size_t kSplitGridPoints = 17;
constexpr double kSplitTolerance = 1e-10;

// Pauli errors in the order of the Bell-diagonal weights: identity, phase
// flip, bit flip, both.
const std::array<Mat2, 4>& pauli_errors() {
  static const std::array<Mat2, 4> paulis = [] {
    std::array<Mat2, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 1, 0, 0, -1;
    p[2] << 0, 1, 1, 0;
    p[3] << 0, cd(0, -1), cd(0, 1), 0;
    return p;
  }();
  return paulis;
}

double von_neumann_entropy(const Mat4& rho) {
  Eigen::SelfAdjointEigenSolver<Mat4> solver(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double w : solver.eigenvalues()) {
    if (w > 0.0) s -= w * std::log2(w);
  }
  return s;
}

// Eve's (unnormalized by 1/2) state conditioned on Alice's Z outcome x.
Mat4 eve_state_given(const std::array<double, 4>& weights, int x) {
  const auto& p = pauli_errors();
  Eigen::Vector2cd ket = Eigen::Vector2cd::Zero();
  ket(x) = 1.0;
  Mat4 rho;
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      const cd overlap = ket.adjoint() * p[l].adjoint() * p[k] * ket;
      rho(k, l) = std::sqrt(weights[k] * weights[l]) * overlap;
    }
  }
  return rho;
}

double sum_entropy_terms(const SixStateDecomposition& lam) {
  return entropy_term(lam.lam00) + entropy_term(lam.lam01) +
         entropy_term(lam.lam10) + entropy_term(lam.lam11);
}

double clamp_weight(double w) { return w < 0.0 && w > -kWeightSlack ? 0.0 : w; }

double bb84_bracket(double q_x, double q_z) {
  return 1.0 - binary_entropy(q_z) - binary_entropy(q_x);
}

}  // namespace

void SixStateDecomposition::validate() const {
  const std::array<double, 4> w{lam00, lam01, lam10, lam11};
  for (double v : w) {
    if (!(v >= -kWeightSlack && v <= 1.0 + kWeightSlack)) {
      throw UnphysicalQberError("QBER triple gives Bell-diagonal weight " +
                                std::to_string(v) + " outside [0, 1]");
    }
  }
  const double sum = lam00 + lam01 + lam10 + lam11;
  if (std::abs(sum - 1.0) > kWeightSlack) {
    throw UnphysicalQberError("Bell-diagonal weights do not sum to 1");
  }
}

SixStateDecomposition six_state_decomposition(const DvChannelStats& stats) {
  const double qx = stats.q_x;
  const double qy = stats.q_y;
  const double qz = stats.q_z;
  SixStateDecomposition lam;
  lam.lam00 = clamp_weight(1.0 - (qx + qy + qz) / 2.0);
  lam.lam01 = clamp_weight((qx + qy - qz) / 2.0);
  lam.lam10 = clamp_weight((-qx + qy + qz) / 2.0);
  lam.lam11 = clamp_weight((qx - qy + qz) / 2.0);
  lam.validate();
  return lam;
}

double preprocessed_key_fraction(const SixStateDecomposition& lam, double q) {
  lam.validate();
  if (!(q >= 0.0 && q <= kQMax)) {
    throw DomainError("preprocessing flip probability must lie in [0, 1/2]");
  }
  const std::array<double, 4> w{std::max(lam.lam00, 0.0),
                                std::max(lam.lam01, 0.0),
                                std::max(lam.lam10, 0.0),
                                std::max(lam.lam11, 0.0)};
  const Mat4 rho0 = eve_state_given(w, 0);
  const Mat4 rho1 = eve_state_given(w, 1);
  const double s_given_0 = von_neumann_entropy((1.0 - q) * rho0 + q * rho1);
  const double s_given_1 = von_neumann_entropy((1.0 - q) * rho1 + q * rho0);
  // Averaging over x kills the off-diagonals: Eve's marginal is diag(w).
  const double s_eve = sum_entropy_terms(lam);
  const double s_x_given_e = 1.0 + 0.5 * (s_given_0 + s_given_1) - s_eve;

  const double q_z = w[2] + w[3];
  const double flipped = q_z * (1.0 - q) + (1.0 - q_z) * q;
  return s_x_given_e - binary_entropy(std::clamp(flipped, 0.0, 1.0));
}

double bb84_preprocessed_key_fraction(double q_x, double q_z, double q) {
  if (q == 0.0) {
    // The worst split is the product t = Q_X Q_Z, where the fraction reduces
    // to the plain bracket.
    return bb84_bracket(q_x, q_z);
  }
  const double t_lo = std::max(0.0, q_x + q_z - 1.0);
  const double t_hi = std::min(q_x, q_z);
  auto fraction_at = [&](double t) {
    SixStateDecomposition lam;
    lam.lam11 = t;
    lam.lam01 = clamp_weight(q_x - t);
    lam.lam10 = clamp_weight(q_z - t);
    lam.lam00 = clamp_weight(1.0 - q_x - q_z + t);
    return preprocessed_key_fraction(lam, q);
  };
  if (t_hi - t_lo <= 0.0) return fraction_at(t_lo);
  return optimize::grid_then_golden_min(fraction_at, t_lo, t_hi,
                                        kSplitGridPoints, kSplitTolerance)
      .value;
}

KeyRateResult bb84_rate(const DvChannelStats& stats) {
  KeyRateResult r = KeyRateResult::make(
      Protocol::BB84, 0.5 * stats.p_success * bb84_bracket(stats.q_x, stats.q_z));
  r.diagnostics = stats;
  return r;
}

KeyRateResult six_state_rate(const DvChannelStats& stats) {
  const SixStateDecomposition lam = six_state_decomposition(stats);
  KeyRateResult r = KeyRateResult::make(
      Protocol::SixState, 0.5 * stats.p_success * (1.0 - sum_entropy_terms(lam)));
  r.diagnostics = stats;
  return r;
}

namespace {

KeyRateResult optimize_flip(Protocol protocol, const DvChannelStats& stats,
                            std::optional<double> fixed_q,
                            const std::function<double(double)>& fraction) {
  double best_q = 0.0;
  double best = 0.0;
  if (fixed_q) {
    if (!(*fixed_q >= 0.0 && *fixed_q <= kQMax)) {
      throw DomainError("preprocessing flip probability must lie in [0, 1/2]");
    }
    best_q = *fixed_q;
    best = fraction(best_q);
  } else {
    best = fraction(0.0);
    try {
      const optimize::Maximum m = optimize::grid_then_golden_max(
          fraction, 0.0, kQMax, kQGridPoints, kQTolerance);
      if (m.value > best) {
        best = m.value;
        best_q = m.x;
      }
    } catch (const DomainError&) {
      // Interior search failed; the q = 0 value stands.
    }
  }
  KeyRateResult r =
      KeyRateResult::make(protocol, 0.5 * stats.p_success * best);
  r.optimal_param = best_q;
  r.diagnostics = stats;
  return r;
}

}  // namespace

KeyRateResult bb84_noisy_rate(const DvChannelStats& stats,
                              std::optional<double> fixed_q) {
  const double qx = stats.q_x;
  const double qz = stats.q_z;
  return optimize_flip(Protocol::NBB84, stats, fixed_q, [&](double q) {
    return bb84_preprocessed_key_fraction(qx, qz, q);
  });
}

KeyRateResult six_state_noisy_rate(const DvChannelStats& stats,
                                   std::optional<double> fixed_q) {
  const SixStateDecomposition lam = six_state_decomposition(stats);
  const double plain = 1.0 - sum_entropy_terms(lam);
  return optimize_flip(Protocol::N6S, stats, fixed_q, [&](double q) {
    return q == 0.0 ? plain : preprocessed_key_fraction(lam, q);
  });
}

}  // namespace qkdrate
