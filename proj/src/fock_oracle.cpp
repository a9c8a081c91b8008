#include "qkdrate/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qkdrate/errors.hpp"
#include "qkdrate/scalar.hpp"

namespace qkdrate {

namespace {

constexpr int kMinQuadratureNodes = 2048;
constexpr int kMaxQuadratureNodes = 1 << 22;
constexpr int kWraps = 6;

// Applies alpha b^dag + beta f^dag to a state with `photons` photons in total,
// stored as amplitudes over the number of photons in b.
// Long double: the alternating signs cancel badly past ~50 photons.
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

VecL create(const VecL& v, long double alpha, long double beta) {
  const int t = static_cast<int>(v.size()) - 1;
  VecL w = VecL::Zero(t + 2);
  for (int j = 0; j <= t; ++j) {
    w(j + 1) += alpha * std::sqrt(j + 1.0L) * v(j);
    w(j) += beta * std::sqrt(t - j + 1.0L) * v(j);
  }
  return w;
}

using Cplx = std::complex<double>;

}  // namespace

int default_cutoff(double n_th, double margin) {
  if (!(n_th >= 0.0)) throw DomainError("thermal occupation must be >= 0");
  return static_cast<int>(std::ceil(40.0 * n_th + margin));
}

double thermal_tail_mass(double n_th, int cutoff) {
  if (n_th == 0.0) return 0.0;
  return std::pow(n_th / (n_th + 1.0), cutoff + 1.0);
}

Eigen::MatrixXd beamsplitter_block(double eta, int total, int columns) {
  if (total < 0) throw DomainError("photon number must be >= 0");
  if (columns < 0 || columns > total + 1) columns = total + 1;
  const long double t = std::sqrt(static_cast<long double>(eta));
  const long double r = std::sqrt(1.0L - eta);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(total + 1, columns);
  for (int m = 0; m < columns; ++m) {
    VecL v = VecL::Ones(1);
    for (int s = 1; s <= total - m; ++s) v = create(v, r, -t) / std::sqrt(static_cast<long double>(s));
    for (int s = 1; s <= m; ++s) v = create(v, t, r) / std::sqrt(static_cast<long double>(s));
    block.col(m) = v.cast<double>();
  }
  return block;
}

FockRail::FockRail(const ThermalLossChannel& ch, std::optional<int> cutoff)
    : cutoff_(cutoff.value_or(default_cutoff(ch.n_th()))),
      tail_(thermal_tail_mass(ch.n_th(), cutoff_)) {
  if (cutoff_ < 1) throw DomainError("Fock cutoff must be >= 1");
  if (tail_ >= kFockTailBound) {
    throw TruncationError("thermal tail mass " + std::to_string(tail_) +
                          " beyond cutoff " + std::to_string(cutoff_));
  }
  const double n = ch.n_th();
  weights_.resize(cutoff_ + 1);
  weights_[0] = 1.0 / (n + 1.0);
  for (int k = 1; k <= cutoff_; ++k) weights_[k] = weights_[k - 1] * n / (n + 1.0);
  blocks_.reserve(cutoff_ + 2);
  for (int total = 0; total <= cutoff_ + 1; ++total) {
    blocks_.push_back(beamsplitter_block(ch.eta(), total, std::min(2, total + 1)));
  }
}

double FockRail::amplitude(int i, int n, int j) const {
  if (i < 0 || i > 1 || n < 0 || n > cutoff_) throw DomainError("rail index out of range");
  const int total = i + n;
  if (j < 0 || j > total) return 0.0;
  return blocks_[total](j, i);
}

double FockRail::transfer(int i, int j, int i2, int j2) const {
  if (i - j != i2 - j2) return 0.0;
  double sum = 0.0;
  for (int n = 0; n <= cutoff_; ++n) {
    sum += weights_[n] * amplitude(i, n, j) * amplitude(i2, n, j2);
  }
  return sum;
}

RailProbabilities oracle_rail_probabilities(const ThermalLossChannel& ch,
                                            std::optional<int> cutoff) {
  const FockRail rail(ch, cutoff);
  RailProbabilities out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.p[i][j] = rail.transfer(i, j, i, j);
  }
  const double right = out.p[1][1] * out.p[0][0];
  const double wrong = out.p[1][0] * out.p[0][1];
  out.p_success = right + wrong;
  if (!(out.p_success > 0.0)) {
    throw DegenerateChannelError("oracle: no single-photon events");
  }
  out.q_z = wrong / out.p_success;
  out.lambda = 2.0 * out.q_z;
  return out;
}

std::complex<double> wrapped_normal_phase_average(double variance) {
  if (!(variance >= 0.0)) throw DomainError("phase variance must be >= 0");
  if (variance == 0.0) return 1.0;
  const double sigma = std::sqrt(variance);
  const double pi = std::numbers::pi;
  const double wanted = std::ceil(64.0 * pi / sigma);
  const int nodes = static_cast<int>(std::clamp(
      wanted, double(kMinQuadratureNodes), double(kMaxQuadratureNodes)));
  const double h = 2.0 * pi / nodes;
  double mass = 0.0;
  Cplx moment = 0.0;
  for (int q = 0; q < nodes; ++q) {
    const double theta = -pi + h * q;
    double density = 0.0;
    for (int k = -kWraps; k <= kWraps; ++k) {
      const double x = theta + 2.0 * pi * k;
      density += std::exp(-x * x / (2.0 * variance));
    }
    mass += density;
    moment += density * std::polar(1.0, theta);
  }
  return moment / mass;
}

Eigen::Matrix2cd QubitMap::apply(const Eigen::Matrix2cd& rho) const {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out += rho(a, b) * image[a][b];
  }
  return out;
}

double QubitMap::success_probability() const { return image[0][0].trace().real(); }

Eigen::Matrix4cd QubitMap::normalized_choi() const {
  Eigen::Matrix4cd choi = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) choi.block<2, 2>(2 * a, 2 * b) = image[a][b];
  }
  return choi / success_probability();
}

namespace {

double basis_error(const QubitMap& map, const Eigen::Vector2cd& sent,
                   const Eigen::Vector2cd& wrong) {
  const Eigen::Matrix2cd out = map.apply(sent * sent.adjoint());
  const Cplx err = wrong.adjoint() * out * wrong;
  return err.real() / out.trace().real();
}

}  // namespace

double QubitMap::qber_z() const {
  return basis_error(*this, Eigen::Vector2cd(1, 0), Eigen::Vector2cd(0, 1));
}

double QubitMap::qber_x() const {
  const double s = std::sqrt(0.5);
  return basis_error(*this, Eigen::Vector2cd(s, s), Eigen::Vector2cd(s, -s));
}

double QubitMap::qber_y() const {
  const double s = std::sqrt(0.5);
  return basis_error(*this, Eigen::Vector2cd(s, Cplx(0, s)),
                     Eigen::Vector2cd(s, Cplx(0, -s)));
}

double QubitMap::coherence_factor() const {
  return image[0][1](0, 1).real() / success_probability();
}

QubitMap oracle_qubit_channel(const ThermalLossChannel& ch, const PhaseNoise& pn,
                              std::optional<int> cutoff) {
  const FockRail rail(ch, cutoff);
  // Logical |0> = photon in rail 1, |1> = photon in rail 2.
  auto photons = [](int logical, int r) { return (logical == 0) == (r == 0) ? 1 : 0; };
  const Cplx phase = wrapped_normal_phase_average(pn.variance());
  QubitMap map;
  for (int in = 0; in < 2; ++in) {
    for (int in2 = 0; in2 < 2; ++in2) {
      Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
      for (int o = 0; o < 2; ++o) {
        for (int o2 = 0; o2 < 2; ++o2) {
          const double rail1 =
              rail.transfer(photons(in, 0), photons(o, 0), photons(in2, 0), photons(o2, 0));
          const double rail2 =
              rail.transfer(photons(in, 1), photons(o, 1), photons(in2, 1), photons(o2, 1));
          Cplx v = rail1 * rail2;
          // Independent rail phases: e^{i(theta1 - theta2)} on |10><01|.
          if (o == 0 && o2 == 1) v *= phase * std::conj(phase);
          if (o == 1 && o2 == 0) v *= std::conj(phase) * phase;
          out(o, o2) = v;
        }
      }
      map.image[in][in2] = out;
    }
  }
  if (!(map.success_probability() > 0.0)) {
    throw DegenerateChannelError("oracle: no single-photon events");
  }
  return map;
}

double oracle_x_basis_qber(const ThermalLossChannel& ch, std::optional<int> cutoff) {
  const FockRail rail(ch, cutoff);
  const Eigen::MatrixXd recombine = beamsplitter_block(0.5, 1);
  const int nmax = rail.cutoff();
  const auto& p = rail.thermal_weights();
  const double s = std::sqrt(0.5);
  double accepted = 0.0;
  double errors = 0.0;
  for (int n1 = 0; n1 <= nmax; ++n1) {
    for (int n2 = 0; n2 <= nmax; ++n2) {
      const double w = p[n1] * p[n2];
      if (w < 1e-300) continue;
      // Environment output (k1, k2) offset by (n1 - 1, n2 - 1); Bob amplitudes
      // indexed by photons in rail 1 (1 -> |10>, 0 -> |01>).
      double acc[3][3][2] = {};
      for (int branch = 0; branch < 2; ++branch) {
        const int i1 = branch == 0 ? 1 : 0;
        const int i2 = 1 - i1;
        for (int j1 = 0; j1 < 2; ++j1) {
          const int j2 = 1 - j1;
          const int k1 = i1 + n1 - j1;
          const int k2 = i2 + n2 - j2;
          if (k1 < 0 || k2 < 0) continue;
          acc[k1 - n1 + 1][k2 - n2 + 1][j1] +=
              s * rail.amplitude(i1, n1, j1) * rail.amplitude(i2, n2, j2);
        }
      }
      for (auto& row : acc) {
        for (auto& v : row) {
          const Eigen::Vector2d bob(v[0], v[1]);
          const Eigen::Vector2d ports = recombine * bob;
          accepted += w * bob.squaredNorm();
          errors += w * ports(0) * ports(0);
        }
      }
    }
  }
  if (!(accepted > 0.0)) throw DegenerateChannelError("oracle: no single-photon events");
  return errors / accepted;
}

double OracleDeviation::max() const {
  return std::max({q_z, q_x, p_success, lambda, x_basis, std::max(0.0, -choi_min_eigenvalue)});
}

OracleDeviation oracle_check(const std::vector<double>& etas,
                             const std::vector<double>& n_ths,
                             const std::vector<double>& variances) {
  OracleDeviation dev;
  for (double eta : etas) {
    for (double n : n_ths) {
      const ThermalLossChannel ch(eta, n);
      const RailProbabilities rails = oracle_rail_probabilities(ch);
      const DvChannelStats thermal = combined_channel_stats(ch);
      dev.q_z = std::max(dev.q_z, std::abs(rails.q_z - thermal.q_z));
      dev.p_success = std::max(dev.p_success, std::abs(rails.p_success - thermal.p_success));
      dev.lambda = std::max(dev.lambda, std::abs(rails.lambda - thermal.lambda));
      for (double v : variances) {
        const PhaseNoise pn(v);
        const DvChannelStats stats = combined_channel_stats(ch, pn);
        const QubitMap map = oracle_qubit_channel(ch, pn);
        const double r2 = std::pow(circular_mean_wrapped_normal(v), 2);
        dev.q_z = std::max(dev.q_z, std::abs(map.qber_z() - stats.q_z));
        dev.q_x = std::max(dev.q_x, std::abs(map.qber_x() - stats.q_x));
        dev.q_x = std::max(dev.q_x, std::abs(map.qber_y() - stats.q_y));
        dev.p_success =
            std::max(dev.p_success, std::abs(map.success_probability() - stats.p_success));
        dev.lambda = std::max(
            dev.lambda, std::abs(map.coherence_factor() - (1.0 - stats.lambda) * r2));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(map.normalized_choi(),
                                                               Eigen::EigenvaluesOnly);
        if (dev.cells == 0) dev.choi_min_eigenvalue = solver.eigenvalues().minCoeff();
        dev.choi_min_eigenvalue =
            std::min(dev.choi_min_eigenvalue, solver.eigenvalues().minCoeff());
        ++dev.cells;
      }
      dev.x_basis = std::max(dev.x_basis, std::abs(oracle_x_basis_qber(ch) - thermal.q_x));
    }
  }
  return dev;
}

}  // namespace qkdrate
