#include "qkdrate/cv_keyrates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qkdrate/errors.hpp"
#include "qkdrate/optimize.hpp"
#include "qkdrate/scalar.hpp"

namespace qkdrate {

namespace {

constexpr double kPhysicalSlack = 1e-9;
constexpr std::size_t kXiGridPoints = 128;
constexpr double kXiGridFloor = 1e-4;
constexpr double kXiTolerance = 1e-6;
constexpr std::size_t kMuGridPoints = 48;
constexpr double kMuTolerance = 1e-7;

// Near-degenerate pairs lose ~sqrt(eps) through the discriminant root, so a
// pure-state eigenvalue can land a hair under 1.
constexpr double kEigenvalueRoundoff = 1e-6;

double g_of_eigenvalue(double nu) {
  if (nu < 1.0 && nu > 1.0 - kEigenvalueRoundoff) nu = 1.0;
  return bosonic_entropy((nu - 1.0) / 2.0);
}

double eve_entropy(const CvCovariance& cov) {
  return g_of_eigenvalue(cov.lambda1()) + g_of_eigenvalue(cov.lambda2());
}

}  // namespace

CvCovariance::CvCovariance(double a, double b, double c) : a_(a), b_(b), c_(c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw NonPhysicalCovarianceError("covariance entries must be finite");
  }
  if (a < 1.0 - kPhysicalSlack || b < 1.0 - kPhysicalSlack) {
    throw NonPhysicalCovarianceError("diagonal variance below the vacuum level");
  }
  const double sum_sq = (a + b) * (a + b) - 4.0 * c * c;
  const double s = sqrt_det();
  if (sum_sq < -kPhysicalSlack || s <= 0.0) {
    throw NonPhysicalCovarianceError("covariance has no valid symplectic spectrum");
  }
  // Delta^2 - 4 det factorizes, which keeps the small eigenvalue accurate.
  const double root = std::abs(a - b) * std::sqrt(std::max(sum_sq, 0.0));
  lambda1_ = std::sqrt(0.5 * (delta() + root));
  lambda2_ = s / lambda1_;
  if (lambda2_ < 1.0 - kPhysicalSlack) {
    throw NonPhysicalCovarianceError("symplectic eigenvalue " + std::to_string(lambda2_) +
                                     " below 1");
  }
}

CvSource::CvSource(double mu) : mu_(mu) {
  if (!(mu >= 1.0) || !std::isfinite(mu)) {
    throw DomainError("source variance mu must be finite and >= 1");
  }
}

CvSource CvSource::from_squeezing_db(double db) {
  if (!(db >= 0.0)) throw DomainError("squeezing must be >= 0 dB");
  return CvSource(std::pow(10.0, db / 10.0));
}

CvSource CvSource::from_modulation(double v_a) {
  if (!(v_a >= 0.0)) throw DomainError("modulation variance must be >= 0");
  return CvSource(v_a + 1.0);
}

CvExcessNoise phase_excess_noise(const CvSource& src, const PhaseNoise& pn,
                                 NoisePlacement placement) {
  return {2.0 * src.v_a() * -std::expm1(-pn.variance() / 2.0), placement};
}

double combine_phase_variances(double v_phi, double v_theta) {
  if (!(v_phi >= 0.0) || !(v_theta >= 0.0)) {
    throw DomainError("phase variances must be >= 0");
  }
  return v_phi + v_theta;
}

CvCovariance build_covariance(const CvSource& src, const ThermalLossChannel& ch,
                              const CvExcessNoise& ex) {
  if (!(ex.epsilon_theta >= 0.0)) throw DomainError("excess noise must be >= 0");
  const double mu = src.mu();
  const double eta = ch.eta();
  const double eps = ex.placement == NoisePlacement::AtOutput ? ex.epsilon_theta
                                                              : eta * ex.epsilon_theta;
  const double b = eta * mu + (1.0 - eta) * (2.0 * ch.n_th() + 1.0) + eps;
  const double c = std::sqrt(eta * (mu * mu - 1.0));
  return CvCovariance(mu, b, c);
}

HolevoTerms sqz_hom_terms(const CvCovariance& cov) {
  const double a = cov.a();
  const double b = cov.b();
  const double c2 = cov.c() * cov.c();
  HolevoTerms t;
  t.mutual_information = 0.5 * std::log2(b / (b - c2 / a));
  t.eve_entropy = eve_entropy(cov);
  t.eve_conditional_entropy = g_of_eigenvalue(std::sqrt(a * cov.sqrt_det() / b));
  return t;
}

HolevoTerms trusted_noise_terms(const CvCovariance& cov, double xi_b) {
  if (!(xi_b >= 0.0)) throw DomainError("trusted noise must be >= 0");
  const double a = cov.a();
  const double b = cov.b();
  const double c2 = cov.c() * cov.c();
  const double s = cov.sqrt_det();
  const double big_a = (b + a * s + xi_b * cov.delta()) / (b + xi_b);
  const double big_b = s * (a + xi_b * s) / (b + xi_b);
  const double root = std::sqrt(std::max(big_a * big_a - 4.0 * big_b, 0.0));
  const double l3 = std::sqrt(0.5 * (big_a + root));
  const double l4 = std::sqrt(big_b) / l3;
  HolevoTerms t;
  t.mutual_information = 0.5 * std::log2((b + xi_b) / (b - c2 / a + xi_b));
  t.eve_entropy = eve_entropy(cov);
  t.eve_conditional_entropy = g_of_eigenvalue(l3) + g_of_eigenvalue(l4);
  return t;
}

HolevoTerms gg02_terms(const CvCovariance& cov) {
  const double a = cov.a();
  const double b = cov.b();
  const double c2 = cov.c() * cov.c();
  HolevoTerms t;
  t.mutual_information = std::log2((b + 1.0) / (b - c2 / (a + 1.0) + 1.0));
  t.eve_entropy = eve_entropy(cov);
  t.eve_conditional_entropy = g_of_eigenvalue(a - c2 / (b + 1.0));
  return t;
}

KeyRateResult sqz_hom_rate(const CvCovariance& cov) {
  KeyRateResult r = KeyRateResult::make(Protocol::SqzHom, sqz_hom_terms(cov).key_rate());
  r.diagnostics = cov;
  return r;
}

KeyRateResult sqz_hom_trusted_noise_rate(const CvCovariance& cov, double xi_b) {
  KeyRateResult r =
      KeyRateResult::make(Protocol::NSqzHom, trusted_noise_terms(cov, xi_b).key_rate());
  r.optimal_param = xi_b;
  r.diagnostics = cov;
  return r;
}

KeyRateResult optimize_trusted_noise(const CvCovariance& cov, double xi_max) {
  if (!(xi_max >= 0.0)) throw DomainError("xi_max must be >= 0");
  auto rate = [&](double xi) { return trusted_noise_terms(cov, xi).key_rate(); };
  double best_xi = 0.0;
  double best = rate(0.0);
  if (xi_max > 0.0) {
    // Log grid in xi, then golden refinement in log space around the winner.
    const double lo = std::log(std::min(kXiGridFloor, xi_max));
    const double hi = std::log(xi_max);
    auto in_log = [&](double u) { return rate(std::exp(u)); };
    const optimize::Maximum m =
        optimize::grid_then_golden_max(in_log, lo, hi, kXiGridPoints, kXiTolerance);
    if (m.value > best) {
      best = m.value;
      best_xi = std::exp(m.x);
    }
  }
  return sqz_hom_trusted_noise_rate(cov, best_xi);
}

KeyRateResult gg02_heterodyne_rate(const CvSource& src, const ThermalLossChannel& ch,
                                   const CvExcessNoise& ex) {
  const CvCovariance cov = build_covariance(src, ch, ex);
  KeyRateResult r = KeyRateResult::make(Protocol::GG02, gg02_terms(cov).key_rate());
  r.diagnostics = cov;
  return r;
}

KeyRateResult cv_rate_at(Protocol protocol, const CvSource& src,
                         const ThermalLossChannel& ch, const PhaseNoise& pn,
                         NoisePlacement placement, std::optional<double> fixed_xi) {
  const CvExcessNoise ex = phase_excess_noise(src, pn, placement);
  switch (protocol) {
    case Protocol::SqzHom:
      return sqz_hom_rate(build_covariance(src, ch, ex));
    case Protocol::NSqzHom:
      return fixed_xi ? sqz_hom_trusted_noise_rate(build_covariance(src, ch, ex), *fixed_xi)
                      : optimize_trusted_noise(build_covariance(src, ch, ex));
    case Protocol::GG02:
      return gg02_heterodyne_rate(src, ch, ex);
    default:
      throw DomainError("not a continuous-variable protocol");
  }
}

KeyRateResult optimize_modulation(Protocol protocol, const ThermalLossChannel& ch,
                                  const PhaseNoise& pn, double mu_max,
                                  NoisePlacement placement,
                                  std::optional<double> fixed_xi) {
  if (!(mu_max >= 1.0)) throw DomainError("mu_max must be >= 1");
  auto at = [&](double log_mu) {
    return cv_rate_at(protocol, CvSource(std::pow(10.0, log_mu)), ch, pn, placement,
                      fixed_xi);
  };
  const double hi = std::log10(mu_max);
  double best_log = 0.0;
  if (hi > 0.0) {
    const optimize::Maximum m = optimize::grid_then_golden_max(
        [&](double u) { return at(u).raw_rate; }, 0.0, hi, kMuGridPoints, kMuTolerance);
    best_log = m.x;
  }
  KeyRateResult r = at(best_log);
  const double mu = std::pow(10.0, best_log);
  r.optimal_param = mu - 1.0;
  return r;
}

}  // namespace qkdrate
