#include "qkdrate/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "qkdrate/errors.hpp"
#include "qkdrate/scalar.hpp"

namespace qkdrate::gaussian {

namespace {

void check_mode(const Matrix& gamma, int mode) {
  const int modes = static_cast<int>(gamma.rows()) / 2;
  if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0) {
    throw DomainError("covariance matrix must be square with even dimension");
  }
  if (mode < 0 || mode >= modes) throw DomainError("mode index out of range");
}

// Splits gamma into the block of `mode` (2x2), the rest, and the cross terms.
struct Blocks {
  Matrix rest;
  Matrix cross;  // rest x 2
  Eigen::Matrix2d measured;
};

Blocks split(const Matrix& gamma, int mode) {
  check_mode(gamma, mode);
  const int n = static_cast<int>(gamma.rows());
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (i / 2 != mode) keep.push_back(i);
  }
  const int m = static_cast<int>(keep.size());
  Blocks b;
  b.rest.resize(m, m);
  b.cross.resize(m, 2);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) b.rest(i, j) = gamma(keep[i], keep[j]);
    b.cross(i, 0) = gamma(keep[i], 2 * mode);
    b.cross(i, 1) = gamma(keep[i], 2 * mode + 1);
  }
  b.measured = gamma.block<2, 2>(2 * mode, 2 * mode);
  return b;
}

}  // namespace

Matrix symplectic_form(int modes) {
  Matrix omega = Matrix::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

Matrix two_mode_covariance(double a, double b, double c) {
  Matrix g = Matrix::Zero(4, 4);
  g(0, 0) = g(1, 1) = a;
  g(2, 2) = g(3, 3) = b;
  g(0, 2) = g(2, 0) = c;
  g(1, 3) = g(3, 1) = -c;
  return g;
}

std::vector<double> symplectic_eigenvalues(const Matrix& gamma) {
  const int modes = static_cast<int>(gamma.rows()) / 2;
  Eigen::EigenSolver<Matrix> solver(symplectic_form(modes) * gamma, false);
  std::vector<double> mags;
  for (const auto& ev : solver.eigenvalues()) mags.push_back(std::abs(ev.imag()));
  std::sort(mags.begin(), mags.end());
  std::vector<double> nu;
  for (int k = 0; k < modes; ++k) nu.push_back(0.5 * (mags[2 * k] + mags[2 * k + 1]));
  return nu;
}

double entropy(const Matrix& gamma) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(gamma)) s += bosonic_entropy((nu - 1.0) / 2.0);
  return s;
}

Matrix condition_on_homodyne_x(const Matrix& gamma, int mode) {
  const Blocks b = split(gamma, mode);
  const double vx = b.measured(0, 0);
  if (!(vx > 0.0)) throw DomainError("homodyne on a mode with zero x variance");
  return b.rest - b.cross.col(0) * b.cross.col(0).transpose() / vx;
}

Matrix condition_on_heterodyne(const Matrix& gamma, int mode) {
  const Blocks b = split(gamma, mode);
  const Eigen::Matrix2d inv = (b.measured + Eigen::Matrix2d::Identity()).inverse();
  return b.rest - b.cross * inv * b.cross.transpose();
}

Matrix mix_with_vacuum(const Matrix& gamma, int mode, double t) {
  check_mode(gamma, mode);
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("transmissivity must lie in [0, 1]");
  const int n = static_cast<int>(gamma.rows());
  Matrix big = Matrix::Identity(n + 2, n + 2);
  big.topLeftCorner(n, n) = gamma;
  Matrix s = Matrix::Identity(n + 2, n + 2);
  const double st = std::sqrt(t);
  const double sr = std::sqrt(1.0 - t);
  for (int q = 0; q < 2; ++q) {
    const int i = 2 * mode + q;
    const int j = n + q;
    s(i, i) = st;
    s(i, j) = sr;
    s(j, i) = -sr;
    s(j, j) = st;
  }
  return s * big * s.transpose();
}

}  // namespace qkdrate::gaussian
