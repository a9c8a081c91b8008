#include "qkdrate/dv_channel.hpp"

#include <cmath>
#include <string>

#include "qkdrate/errors.hpp"

namespace qkdrate {

namespace {

// 2 N (1 + N) (1 - eta)^2, the noise weight shared by lambda, Q and P_S.
double noise_weight(const ThermalLossChannel& ch) {
  const double loss = 1.0 - ch.eta();
  return 2.0 * ch.n_th() * (1.0 + ch.n_th()) * loss * loss;
}

void require_nondegenerate(const ThermalLossChannel& ch) {
  if (ch.degenerate()) {
    throw DegenerateChannelError(
        "channel with eta = 0 and n_th = 0 has no defined QBER");
  }
}

}  // namespace

ThermalLossChannel::ThermalLossChannel(double eta, double n_th)
    : eta_(eta), n_th_(n_th) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("transmissivity " + std::to_string(eta) +
                      " outside [0, 1]");
  }
  if (!(n_th >= 0.0) || std::isinf(n_th)) {
    throw DomainError("thermal photon number " + std::to_string(n_th) +
                      " must be finite and >= 0");
  }
}

ThermalLossChannel ThermalLossChannel::dual_rail(double eta1, double n_th1,
                                                 double eta2, double n_th2) {
  if (eta1 != eta2 || n_th1 != n_th2) {
    throw DomainError("asymmetric dual-rail channels are not supported");
  }
  return {eta1, n_th1};
}

PhaseNoise::PhaseNoise(double variance) : variance_(variance) {
  if (!(variance >= 0.0) || std::isinf(variance)) {
    throw DomainError("phase-noise variance must be finite and >= 0");
  }
}

double depolarizing_parameter(const ThermalLossChannel& ch) {
  require_nondegenerate(ch);
  const double w = noise_weight(ch);
  return w / (ch.eta() + w);
}

Probability success_probability(const ThermalLossChannel& ch) {
  const double g = ch.gamma();
  const double g2 = g * g;
  return Probability((ch.eta() + noise_weight(ch)) / (g2 * g2));
}

Probability thermal_qber(const ThermalLossChannel& ch) {
  return Probability(0.5 * depolarizing_parameter(ch));
}

DvChannelStats combined_channel_stats(const ThermalLossChannel& ch,
                                      const PhaseNoise& pn) {
  const double lambda = depolarizing_parameter(ch);
  const double r = circular_mean_wrapped_normal(pn.variance());
  const double r2 = r * r;
  const double q_xy = 0.5 * ((1.0 - lambda) * (1.0 - r2) + lambda);
  DvChannelStats s;
  s.lambda = lambda;
  s.p_success = success_probability(ch);
  s.q_x = Probability(q_xy);
  s.q_y = Probability(q_xy);
  s.q_z = Probability(0.5 * lambda);
  s.gamma = ch.gamma();
  return s;
}

DvChannelStats stats_from_qbers(double q_x, double q_y, double q_z,
                                double p_success) {
  DvChannelStats s;
  s.q_x = Probability(q_x);
  s.q_y = Probability(q_y);
  s.q_z = Probability(q_z);
  s.p_success = Probability(p_success);
  s.lambda = 2.0 * s.q_z;
  s.gamma = 1.0;
  return s;
}

}  // namespace qkdrate
