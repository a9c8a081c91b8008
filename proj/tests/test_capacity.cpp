#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracle.hpp"
#include "qkdrate/capacity.hpp"
#include "qkdrate/errors.hpp"

using namespace qkdrate;
using oracle::Big;

TEST_CASE("pure-loss bounds coincide") {
  const CapacityBounds b = plob_bounds(ThermalLossChannel(0.5, 0.0));
  CHECK(b.lower == 1.0);
  REQUIRE(b.upper);
  CHECK(*b.upper == 1.0);
  CHECK_FALSE(b.entanglement_breaking);
  for (int i = 0; i < 100; ++i) {
    const double eta = i / 100.0;
    const CapacityBounds c = plob_bounds(ThermalLossChannel(eta, 0.0));
    REQUIRE(std::abs(c.lower + std::log2(1.0 - eta)) <= 1e-12);
    if (eta > 0.0) REQUIRE(std::abs(*c.upper - c.lower) <= 1e-12);
  }
}

TEST_CASE("thermal bounds") {
  const CapacityBounds b = plob_bounds(ThermalLossChannel(0.8, 0.1));
  const Big g = oracle::G(Big("0.1"));
  const double lower = static_cast<double>(-oracle::log2b(Big("0.2")) - g);
  const double upper = static_cast<double>(-oracle::log2b(Big("0.2")) - Big("0.1") * oracle::log2b(Big("0.8")) - g);
  CHECK(b.lower == doctest::Approx(lower).epsilon(1e-14));
  CHECK(*b.upper == doctest::Approx(upper).epsilon(1e-14));
  CHECK(std::abs(b.lower - 1.838481) < 1e-6);
  CHECK(std::abs(*b.upper - 1.870674) < 1e-6);
}

TEST_CASE("entanglement-breaking boundary") {
  const CapacityBounds b = plob_bounds(ThermalLossChannel(0.5, 1.0));
  CHECK(b.entanglement_breaking);
  CHECK_FALSE(b.upper);
  CHECK(is_entanglement_breaking(ThermalLossChannel(0.2, 0.25)));
  CHECK_FALSE(is_entanglement_breaking(ThermalLossChannel(0.2, 0.2499)));
  CHECK(is_entanglement_breaking(ThermalLossChannel(0.0, 0.0)));
}

TEST_CASE("lossless sentinel") {
  const CapacityBounds b = plob_bounds(ThermalLossChannel(1.0, 0.3));
  CHECK(std::isinf(b.lower));
  CHECK(std::isinf(*b.upper));
}

TEST_CASE("normalization") {
  const CapacityBounds b = plob_bounds(ThermalLossChannel(0.5, 0.0));
  CHECK(normalize_rate(KeyRateResult::make(Protocol::BB84, -0.2), b) == 0.0);
  CHECK(normalize_rate(KeyRateResult::make(Protocol::BB84, 1.0), b) == 1.0);
  CHECK(normalize_rate(KeyRateResult::make(Protocol::BB84, 0.25), b) == 0.25);
  CHECK_THROWS_AS(normalize_rate(KeyRateResult::make(Protocol::BB84, 0.1),
                                 plob_bounds(ThermalLossChannel(0.5, 1.0))),
                  NormalizationUnavailableError);
}

TEST_CASE("property: lower bound monotone") {
  for (double n : {0.0, 0.05, 0.5}) {
    double prev = -1e9;
    for (int i = 1; i < 100; ++i) {
      const double l = plob_bounds(ThermalLossChannel(i / 100.0, n)).lower;
      REQUIRE(l > prev);
      prev = l;
    }
  }
  for (double eta : {0.3, 0.9}) {
    double prev = 1e9;
    for (int i = 0; i < 100; ++i) {
      const double l = plob_bounds(ThermalLossChannel(eta, i * 0.03)).lower;
      REQUIRE(l < prev);
      prev = l;
    }
  }
}

TEST_CASE("KeyRateResult clamps") {
  const KeyRateResult neg = KeyRateResult::make(Protocol::GG02, -1.0);
  CHECK(neg.rate == 0.0);
  CHECK(neg.raw_rate == -1.0);
  const KeyRateResult pos = KeyRateResult::make(Protocol::GG02, 0.3);
  CHECK(pos.rate == pos.raw_rate);
}
