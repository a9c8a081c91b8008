#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "qkdrate/cv_covariance.hpp"
#include "qkdrate/dv_channel.hpp"

namespace qkdrate {

enum class Protocol { BB84, SixState, NBB84, N6S, SqzHom, NSqzHom, GG02 };

/// Display name, e.g. "Sqz-Hom".
std::string_view protocol_name(Protocol p);
/// Lower-case identifier used for CSV columns, e.g. "sqz_hom".
std::string_view protocol_column(Protocol p);
/// Accepts display names and column identifiers, case-insensitively.
std::optional<Protocol> parse_protocol(std::string_view text);

[[nodiscard]] constexpr bool is_dv(Protocol p) {
  return p == Protocol::BB84 || p == Protocol::SixState ||
         p == Protocol::NBB84 || p == Protocol::N6S;
}

/// Rate in bits per channel use (per polarization channel for DV).
struct KeyRateResult {
  Protocol protocol = Protocol::BB84;
  double raw_rate = 0.0;
  double rate = 0.0;
  /// q for NBB84/N6S, xi_B for NSqz-Hom, V_A when modulation is optimized.
  std::optional<double> optimal_param;
  std::variant<std::monostate, DvChannelStats, CvCovariance> diagnostics;

  static KeyRateResult make(Protocol p, double raw) {
    KeyRateResult r;
    r.protocol = p;
    r.raw_rate = raw;
    r.rate = raw > 0.0 ? raw : 0.0;
    return r;
  }
};

}  // namespace qkdrate
