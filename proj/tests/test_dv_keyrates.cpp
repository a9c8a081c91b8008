#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "qkdrate/dv_channel.hpp"
#include "qkdrate/dv_keyrates.hpp"
#include "qkdrate/errors.hpp"
#include "qkdrate/scalar.hpp"

using namespace qkdrate;
using oracle::Big;

namespace {

using Cd = std::complex<double>;

double vn_bits(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(m, Eigen::EigenvaluesOnly);
  double out = 0.0;
  for (double w : s.eigenvalues()) {
    if (w > 1e-15) out -= w * std::log2(w);
  }
  return out;
}

// Independent route: build the purified three-party state
// sum_k sqrt(lam_k) |Bell_k>_AB |k>_E, measure A in Z, flip with prob q, and
// read S(X'|E) - H(X'|Y) off explicit partial traces.
double tripartite_key_fraction(const std::array<double, 4>& lam, double q) {
  const double s = std::sqrt(0.5);
  // Bell states on |AB> in order 00, 01, 10, 11.
  const std::array<std::array<double, 4>, 4> bell{{
      {s, 0, 0, s},    // phi+
      {s, 0, 0, -s},   // phi-  (phase flip)
      {0, s, s, 0},    // psi+  (bit flip)
      {0, s, -s, 0},   // psi-  (both)
  }};
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);  // index (ab)*4 + e
  for (int k = 0; k < 4; ++k) {
    for (int ab = 0; ab < 4; ++ab) psi(ab * 4 + k) += std::sqrt(std::max(0.0, lam[k])) * bell[k][ab];
  }
  std::array<Eigen::MatrixXcd, 2> eve;
  std::array<std::array<double, 2>, 2> joint{};
  for (int x = 0; x < 2; ++x) {
    eve[x] = Eigen::MatrixXcd::Zero(4, 4);
    for (int y = 0; y < 2; ++y) {
      const Eigen::VectorXcd branch = psi.segment((2 * x + y) * 4, 4);
      eve[x] += branch * branch.adjoint();
      joint[x][y] = branch.squaredNorm();
    }
  }
  double s_xe = 0.0;
  std::array<std::array<double, 2>, 2> flipped{};
  for (int x = 0; x < 2; ++x) {
    s_xe += vn_bits((1 - q) * eve[x] + q * eve[1 - x]);
    for (int y = 0; y < 2; ++y) flipped[x][y] = (1 - q) * joint[x][y] + q * joint[1 - x][y];
  }
  const double s_e = vn_bits(eve[0] + eve[1]);
  double h_xy = 0.0;
  double h_y = 0.0;
  for (int y = 0; y < 2; ++y) {
    const double py = flipped[0][y] + flipped[1][y];
    if (py > 0) h_y -= py * std::log2(py);
    for (int x = 0; x < 2; ++x) {
      if (flipped[x][y] > 0) h_xy -= flipped[x][y] * std::log2(flipped[x][y]);
    }
  }
  return (s_xe - s_e) - (h_xy - h_y);
}

double sym_6s_oracle(const Big& qb) {
  return 0.5 * (1.0 - oracle::H(1 - 3 * qb / 2) - 3 * oracle::H(qb / 2));
}

}  // namespace

TEST_CASE("BB84 rate examples") {
  CHECK(bb84_rate(combined_channel_stats(ThermalLossChannel(1.0, 0.0))).rate == 0.5);
  CHECK(bb84_rate(combined_channel_stats(ThermalLossChannel(0.5, 0.0))).rate ==
        doctest::Approx(0.25).epsilon(1e-15));
  const KeyRateResult r = bb84_rate(combined_channel_stats(ThermalLossChannel(0.5, 1.0)));
  const double expected = (8.0 / 27.0) / 2.0 * (1.0 - 2.0 * oracle::h(Big(1) / 3));
  CHECK(r.raw_rate == doctest::Approx(expected).epsilon(1e-13));
  CHECK(std::abs(r.raw_rate - (-0.1239)) < 1e-4);
  CHECK(r.rate == 0.0);
  CHECK(r.protocol == Protocol::BB84);
  CHECK(std::holds_alternative<DvChannelStats>(r.diagnostics));
}

TEST_CASE("BB84 dephasing-only path uses the asymmetric bracket") {
  for (double v : {0.01, 0.1, 0.5}) {
    const DvChannelStats s = combined_channel_stats(ThermalLossChannel(1.0, 0.0), PhaseNoise(v));
    CHECK(bb84_rate(s).raw_rate == doctest::Approx(0.5 * (1.0 - binary_entropy(s.q_x))));
  }
}

TEST_CASE("six-state rate examples") {
  CHECK(six_state_rate(stats_from_qbers(0, 0, 0)).rate == 0.5);
  const KeyRateResult r = six_state_rate(stats_from_qbers(0.05, 0.05, 0.05));
  CHECK(r.raw_rate == doctest::Approx(sym_6s_oracle(Big("0.05"))).epsilon(1e-13));
  CHECK(std::abs(r.raw_rate - 0.24840) < 1e-4);
  CHECK(std::abs(six_state_rate(stats_from_qbers(0.1262, 0.1262, 0.1262)).raw_rate) < 1e-3);
  CHECK_THROWS_AS(six_state_rate(stats_from_qbers(0.5, 0.0, 0.0)), UnphysicalQberError);
}

TEST_CASE("Bell-diagonal decomposition") {
  const SixStateDecomposition lam = six_state_decomposition(stats_from_qbers(0.1, 0.2, 0.15));
  CHECK(lam.lam00 == doctest::Approx(1.0 - 0.225));
  CHECK(lam.lam01 == doctest::Approx(0.075));
  CHECK(lam.lam10 == doctest::Approx(0.125));
  CHECK(lam.lam11 == doctest::Approx(0.025));
  SixStateDecomposition bad{0.5, 0.6, -0.1, 0.0};
  CHECK_THROWS_AS(bad.validate(), UnphysicalQberError);
}

TEST_CASE("preprocessed fraction against the tripartite construction") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 4> w{};
    double total = 0.0;
    for (double& x : w) total += (x = u(rng) * (trial % 3 == 0 ? 0.1 : 1.0));
    w[0] += trial % 3 == 0 ? 1.0 : 0.0;
    total = w[0] + w[1] + w[2] + w[3];
    for (double& x : w) x /= total;
    const double q = 0.5 * u(rng);
    const SixStateDecomposition lam{w[0], w[1], w[2], w[3]};
    REQUIRE(preprocessed_key_fraction(lam, q) ==
            doctest::Approx(tripartite_key_fraction(w, q)).epsilon(1e-9));
  }
}

TEST_CASE("preprocessed fraction reduces to the plain bracket at q = 0") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const double qx = u(rng);
    const double qz = u(rng);
    const double qy = std::clamp(u(rng), std::abs(qx - qz), std::min(qx + qz, 2.0 - qx - qz));
    const SixStateDecomposition lam = six_state_decomposition(stats_from_qbers(qx, qy, qz));
    const double plain = 1.0 - entropy_term(lam.lam00) - entropy_term(lam.lam01) -
                         entropy_term(lam.lam10) - entropy_term(lam.lam11);
    REQUIRE(preprocessed_key_fraction(lam, 0.0) == doctest::Approx(plain).epsilon(1e-10));
    // The worst case over the unobserved split at q = 0 is the BB84 bracket.
    double worst = 1e9;
    const double lo = std::max(0.0, qx + qz - 1.0);
    const double hi = std::min(qx, qz);
    for (int i = 0; i <= 400; ++i) {
      const double t = lo + (hi - lo) * i / 400.0;
      worst = std::min(worst, tripartite_key_fraction({1 - qx - qz + t, qx - t, qz - t, t}, 0.0));
    }
    const double bracket = 1.0 - binary_entropy(qx) - binary_entropy(qz);
    REQUIRE(bb84_preprocessed_key_fraction(qx, qz, 0.0) == doctest::Approx(bracket).epsilon(1e-12));
    REQUIRE(worst == doctest::Approx(bracket).epsilon(1e-5));
  }
}

TEST_CASE("BB84 worst-case split matches a dense scan") {
  for (double qsym : {0.03, 0.08, 0.12}) {
    for (double q : {0.05, 0.2, 0.4}) {
      double worst = 1e9;
      for (int i = 0; i <= 2000; ++i) {
        const double t = qsym * i / 2000.0;
        worst = std::min(worst, tripartite_key_fraction({1 - 2 * qsym + t, qsym - t, qsym - t, t}, q));
      }
      const double got = bb84_preprocessed_key_fraction(qsym, qsym, q);
      REQUIRE(got <= worst + 1e-12);
      REQUIRE(got == doctest::Approx(worst).epsilon(1e-6));
    }
  }
}

TEST_CASE("noisy BB84 examples") {
  const KeyRateResult clean = bb84_noisy_rate(combined_channel_stats(ThermalLossChannel(0.7, 0.0)));
  CHECK(clean.rate == doctest::Approx(0.35).epsilon(1e-14));
  REQUIRE(clean.optimal_param);
  CHECK(*clean.optimal_param == 0.0);

  const DvChannelStats s5 = stats_from_qbers(0.05, 0.05, 0.05);
  CHECK(bb84_noisy_rate(s5).raw_rate >= bb84_rate(s5).raw_rate);

  const DvChannelStats s12 = stats_from_qbers(0.12, 0.12, 0.12);
  CHECK(bb84_rate(s12).raw_rate <= 0.0);
  const KeyRateResult n12 = bb84_noisy_rate(s12);
  CHECK(n12.raw_rate > 0.0);
  CHECK(*n12.optimal_param > 0.0);
  CHECK(n12.protocol == Protocol::NBB84);

  const KeyRateResult fixed = bb84_noisy_rate(s12, 0.0);
  CHECK(fixed.raw_rate == doctest::Approx(bb84_rate(s12).raw_rate).epsilon(1e-14));
  CHECK_THROWS_AS(bb84_noisy_rate(s12, 0.7), DomainError);
}

TEST_CASE("noisy six-state examples") {
  const KeyRateResult clean = six_state_noisy_rate(stats_from_qbers(0, 0, 0));
  CHECK(clean.rate == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*clean.optimal_param == 0.0);
  const DvChannelStats s10 = stats_from_qbers(0.1, 0.1, 0.1);
  CHECK(six_state_noisy_rate(s10).raw_rate >= six_state_rate(s10).raw_rate);
  const DvChannelStats s135 = stats_from_qbers(0.135, 0.135, 0.135);
  CHECK(six_state_rate(s135).raw_rate <= 0.0);
  CHECK(six_state_noisy_rate(s135).raw_rate > 0.0);
}

TEST_CASE("property: 6S beats BB84 on symmetric QBER") {
  for (int i = 0; i <= 126; ++i) {
    const DvChannelStats s = stats_from_qbers(i * 1e-3, i * 1e-3, i * 1e-3);
    REQUIRE(six_state_rate(s).raw_rate >= bb84_rate(s).raw_rate - 1e-15);
  }
}

TEST_CASE("property: noisy variants dominate plain ones") {
  for (double eta : {0.2, 0.5, 0.8, 1.0}) {
    for (double n : {0.0, 0.02, 0.1, 0.3}) {
      for (double v : {0.0, 0.05}) {
        const DvChannelStats s = combined_channel_stats(ThermalLossChannel(eta, n), PhaseNoise(v));
        REQUIRE(bb84_noisy_rate(s).raw_rate >= bb84_rate(s).raw_rate);
        REQUIRE(six_state_noisy_rate(s).raw_rate >= six_state_rate(s).raw_rate);
      }
    }
  }
}

TEST_CASE("property: BB84 threshold is the root of 1 - 2h(Q)") {
  double lo = 0.05;
  double hi = 0.2;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bb84_rate(stats_from_qbers(mid, mid, mid)).raw_rate > 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(lo - 0.110028) < 1e-4);
}

TEST_CASE("property: rates scale linearly in success probability") {
  for (double p : {0.1, 0.37, 0.9}) {
    const DvChannelStats one = stats_from_qbers(0.04, 0.06, 0.03, 1.0);
    const DvChannelStats scaled = stats_from_qbers(0.04, 0.06, 0.03, p);
    CHECK(bb84_rate(scaled).raw_rate == doctest::Approx(p * bb84_rate(one).raw_rate));
    CHECK(six_state_rate(scaled).raw_rate == doctest::Approx(p * six_state_rate(one).raw_rate));
    CHECK(six_state_noisy_rate(scaled).raw_rate ==
          doctest::Approx(p * six_state_noisy_rate(one).raw_rate));
  }
}
