#pragma once

namespace qkdrate {

/// Two-mode covariance [[a I, c Z], [c Z, b I]] in shot-noise units
/// (vacuum variance 1). Construction checks physicality.
class CvCovariance {
 public:
  CvCovariance(double a, double b, double c);

  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] double c() const { return c_; }

  /// a^2 + b^2 - 2 c^2.
  [[nodiscard]] double delta() const { return a_ * a_ + b_ * b_ - 2.0 * c_ * c_; }
  /// ab - c^2, the square root of the full determinant.
  [[nodiscard]] double sqrt_det() const { return a_ * b_ - c_ * c_; }
  /// (ab - c^2)^2.
  [[nodiscard]] double det() const { return sqrt_det() * sqrt_det(); }

  [[nodiscard]] double lambda1() const { return lambda1_; }
  [[nodiscard]] double lambda2() const { return lambda2_; }

 private:
  double a_;
  double b_;
  double c_;
  double lambda1_ = 1.0;
  double lambda2_ = 1.0;
};

}  // namespace qkdrate
