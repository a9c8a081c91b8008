#pragma once

// Scalar entropy kernels shared by the DV and CV rate formulas. All entropies
// are in bits.

namespace qkdrate {

/// Probability in [0, 1]. Values within 1e-12 outside the interval are clamped;
/// anything further out throws DomainError.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  [[nodiscard]] constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }  // NOLINT

 private:
  double value_ = 0.0;
};

/// h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0.
double binary_entropy(double x);

/// H(x) = -x log2 x, with H(0) = 0.
double entropy_term(double x);

/// G(x) = (x+1) log2(x+1) - x log2 x, the entropy of a thermal state with mean
/// occupation x. Negative inputs down to -1e-9 are treated as 0.
double bosonic_entropy(double x);

/// Circular mean e^{-variance/2} of a wrapped normal distribution.
double circular_mean_wrapped_normal(double variance);

}  // namespace qkdrate
