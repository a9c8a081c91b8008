#include "qkdrate/protocols.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "qkdrate/dv_keyrates.hpp"
#include "qkdrate/errors.hpp"

namespace qkdrate {

namespace {

struct Names {
  Protocol protocol;
  std::string_view display;
  std::string_view column;
};

constexpr std::array<Names, 7> kNames{{
    {Protocol::BB84, "BB84", "bb84"},
    {Protocol::SixState, "6S", "six_state"},
    {Protocol::NBB84, "NBB84", "nbb84"},
    {Protocol::N6S, "N6S", "n6s"},
    {Protocol::SqzHom, "Sqz-Hom", "sqz_hom"},
    {Protocol::NSqzHom, "NSqz-Hom", "nsqz_hom"},
    {Protocol::GG02, "GG02", "gg02"},
}};

std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view protocol_name(Protocol p) {
  for (const auto& n : kNames) {
    if (n.protocol == p) return n.display;
  }
  return "?";
}

std::string_view protocol_column(Protocol p) {
  for (const auto& n : kNames) {
    if (n.protocol == p) return n.column;
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
  const std::string key = fold(text);
  for (const auto& n : kNames) {
    if (key == fold(n.display) || key == fold(n.column)) return n.protocol;
  }
  if (key == "sixstate" || key == "6state") return Protocol::SixState;
  return std::nullopt;
}

KeyRateResult evaluate(Protocol protocol, const ProtocolSettings& settings,
                       const ThermalLossChannel& ch, const PhaseNoise& pn) {
  if (is_dv(protocol)) {
    const PhaseNoise dv_noise =
        settings.dv_includes_v_phi
            ? PhaseNoise(combine_phase_variances(settings.v_phi, pn.variance()))
            : pn;
    const DvChannelStats stats = combined_channel_stats(ch, dv_noise);
    switch (protocol) {
      case Protocol::BB84:
        return bb84_rate(stats);
      case Protocol::SixState:
        return six_state_rate(stats);
      case Protocol::NBB84:
        return bb84_noisy_rate(stats, settings.q);
      default:
        return six_state_noisy_rate(stats, settings.q);
    }
  }
  const PhaseNoise cv_noise(combine_phase_variances(settings.v_phi, pn.variance()));
  if (settings.optimize_va) {
    return optimize_modulation(protocol, ch, cv_noise, settings.mu_max, settings.placement,
                               settings.xi_b);
  }
  const CvSource src(settings.mu.value_or(settings.mu_max));
  return cv_rate_at(protocol, src, ch, cv_noise, settings.placement, settings.xi_b);
}

}  // namespace qkdrate
