#pragma once

// Matrix-level Gaussian-state utilities. The closed-form CV rates work with
// the (a, b, c) parametrization directly; these routines redo the same
// computations on explicit covariance matrices and serve as a cross-check.
// Quadrature ordering is (x1, p1, x2, p2, ...), shot-noise units.

#include <Eigen/Dense>
#include <vector>

namespace qkdrate::gaussian {

using Matrix = Eigen::MatrixXd;

Matrix symplectic_form(int modes);

/// Covariance [[a I, c Z], [c Z, b I]].
Matrix two_mode_covariance(double a, double b, double c);

/// Symplectic eigenvalues in ascending order, from the spectrum of Omega*gamma.
std::vector<double> symplectic_eigenvalues(const Matrix& gamma);

/// Von Neumann entropy sum_k G((nu_k - 1)/2), in bits.
double entropy(const Matrix& gamma);

/// Covariance of the remaining modes after an x-quadrature homodyne on `mode`.
Matrix condition_on_homodyne_x(const Matrix& gamma, int mode);

/// Covariance of the remaining modes after heterodyne detection of `mode`.
Matrix condition_on_heterodyne(const Matrix& gamma, int mode);

/// Mixes `mode` with a fresh vacuum mode on a beamsplitter of transmissivity t.
/// The vacuum's output port is appended as the last mode.
Matrix mix_with_vacuum(const Matrix& gamma, int mode, double t);

}  // namespace qkdrate::gaussian
