#include "qkdrate/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qkdrate/errors.hpp"

namespace qkdrate {

namespace {

constexpr double kProbabilitySlack = 1e-12;
constexpr double kBosonicReject = 1e-9;

double checked_probability(double x, const char* what) {
  if (!(x >= -kProbabilitySlack && x <= 1.0 + kProbabilitySlack)) {
    throw DomainError(std::string(what) + ": argument " + std::to_string(x) +
                      " outside [0, 1]");
  }
  return std::clamp(x, 0.0, 1.0);
}

// -x log2 x with the continuous extension at 0.
double xlog2x(double x) { return x == 0.0 ? 0.0 : x * std::log2(x); }

}  // namespace

Probability::Probability(double value)
    : value_(checked_probability(value, "Probability")) {}

double binary_entropy(double x) {
  x = checked_probability(x, "binary_entropy");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -xlog2x(x) - (1.0 - x) * std::log1p(-x) / std::numbers::ln2;
}

double entropy_term(double x) {
  x = checked_probability(x, "entropy_term");
  return -xlog2x(x);
}

double bosonic_entropy(double x) {
  if (std::isnan(x) || x < -kBosonicReject) {
    throw DomainError("bosonic_entropy: argument " + std::to_string(x) +
                      " corresponds to a symplectic eigenvalue below 1");
  }
  // Tiny negatives come from rounding in symplectic eigenvalues near 1.
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log1p(x) / std::numbers::ln2 - xlog2x(x);
}

double circular_mean_wrapped_normal(double variance) {
  if (std::isnan(variance) || variance < 0.0) {
    throw DomainError("circular_mean_wrapped_normal: negative variance");
  }
  return std::exp(-0.5 * variance);
}

}  // namespace qkdrate
