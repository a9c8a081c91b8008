#include "qkdrate/compare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "qkdrate/errors.hpp"

namespace qkdrate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNoiseBracketStart = 1e-3;
constexpr double kNoiseBracketCap = 1e6;
constexpr double kDistanceBracketStart = 1.0;
constexpr double kDistanceBracketCap = 1e5;
// Optimized rates carry optimizer noise well below this.
constexpr double kMonotoneSlack = 1e-7;

bool rises(double from, double to) {
  return to > from + kMonotoneSlack * std::max(std::abs(from), 1e-12);
}

}  // namespace

double find_frontier(const std::function<double(double)>& rate, double start, double cap,
                double k0) {
  if (!(k0 > 0.0)) throw DomainError("rate threshold k0 must be > 0");
  const double k_at_zero = rate(0.0);
  if (k_at_zero < k0) return 0.0;
  double lo = 0.0;
  double k_lo = k_at_zero;
  double hi = start;
  double k_hi = rate(hi);
  while (k_hi >= k0) {
    if (rises(k_lo, k_hi)) throw MonotonicityError("rate increases while bracketing");
    if (hi >= cap) return kInf;
    lo = hi;
    k_lo = k_hi;
    hi *= 2.0;
    k_hi = rate(hi);
  }
  if (rises(k_lo, k_hi)) throw MonotonicityError("rate increases while bracketing");
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double k_mid = rate(mid);
    if (rises(k_lo, k_mid) || rises(k_mid, k_hi)) {
      throw MonotonicityError("rate is not monotone inside the frontier bracket");
    }
    if (std::abs(k_mid - k0) <= kFrontierRelTol * k0) return mid;
    if (k_mid >= k0) {
      lo = mid;
      k_lo = k_mid;
    } else {
      hi = mid;
      k_hi = k_mid;
    }
  }
  return std::abs(k_lo - k0) <= std::abs(k_hi - k0) ? lo : hi;
}

namespace {

template <typename Fn>
ComparisonMap build_map(std::string x_name, std::string y_name, const std::vector<double>& xs,
                        const std::vector<double>& ys, Fn cell_values) {
  ComparisonMap map;
  map.x_name = std::move(x_name);
  map.y_name = std::move(y_name);
  map.xs = xs;
  map.ys = ys;
  map.cells.resize(xs.size() * ys.size());
  parallel_for(map.cells.size(), [&](std::size_t idx) {
    MapCell& cell = map.cells[idx];
    cell.x = xs[idx / ys.size()];
    cell.y = ys[idx % ys.size()];
    try {
      const auto [cv, dv] = cell_values(cell.x, cell.y);
      cell.cv = cv;
      cell.dv = dv;
      cell.metric = relative_difference(cv, dv);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return map;
}

}  // namespace

LinkModel::LinkModel(double distance_km, double attenuation_db_per_km)
    : distance_km_(distance_km), attenuation_(attenuation_db_per_km) {
  if (!(distance_km >= 0.0)) throw DomainError("distance must be >= 0");
  if (!(attenuation_db_per_km > 0.0)) throw DomainError("attenuation must be > 0");
}

LinkModel LinkModel::from_eta(double eta, double attenuation_db_per_km) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("link transmissivity must lie in (0, 1]");
  return LinkModel(-10.0 * std::log10(eta) / attenuation_db_per_km, attenuation_db_per_km);
}

double LinkModel::eta() const { return std::pow(10.0, -attenuation_ * distance_km_ / 10.0); }

PhaseNoise jitter_to_phase_noise(const JitterSpec& j) {
  if (!(j.fwhm_s >= 0.0)) throw DomainError("jitter FWHM must be >= 0");
  if (!(j.rep_rate_hz > 0.0)) throw DomainError("repetition rate must be > 0");
  const double num = 2.0 * std::numbers::pi * j.fwhm_s;
  const double den = 2.0 * std::sqrt(2.0 * std::numbers::ln2) * j.pulse_spacing_s();
  return PhaseNoise((num * num) / (den * den));
}

std::optional<double> relative_difference(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("relative difference of NaN");
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  if (a == 0.0 && b == 0.0) return std::nullopt;
  if (std::isinf(a) && std::isinf(b)) return 0.0;
  if (std::isinf(a)) return 1.0;
  if (std::isinf(b)) return -1.0;
  return (a - b) / std::max(a, b);
}

std::optional<double> relative_rate_advantage(const KeyRateResult& k_cv,
                                              const KeyRateResult& k_dv) {
  return relative_difference(k_cv.rate, k_dv.rate);
}

double RateModel::rate(double distance_km, double n_th, double sigma2) const {
  const ThermalLossChannel ch(LinkModel(distance_km, attenuation_db_per_km).eta(), n_th);
  return evaluate(protocol, settings, ch, PhaseNoise(sigma2)).rate;
}

RateModel default_cv_model() {
  RateModel m;
  m.protocol = Protocol::SqzHom;
  m.settings.optimize_va = true;
  return m;
}

RateModel default_dv_model() {
  RateModel m;
  m.protocol = Protocol::SixState;
  return m;
}

double max_tolerable_thermal_noise(const RateModel& model, double sigma2,
                                   double distance_km, double k0) {
  return find_frontier([&](double n) { return model.rate(distance_km, n, sigma2); },
                  kNoiseBracketStart, kNoiseBracketCap, k0);
}

double max_distance(const RateModel& model, double sigma2, double n_th, double k0) {
  return find_frontier([&](double d) { return model.rate(d, n_th, sigma2); },
                  kDistanceBracketStart, kDistanceBracketCap, k0);
}

ComparisonMap noise_frontier_map(const std::vector<double>& sigma2_grid,
                                 const std::vector<double>& distance_grid, double k0,
                                 const RateModel& cv, const RateModel& dv) {
  return build_map("sigma2", "distance_km", sigma2_grid, distance_grid,
                   [&](double s2, double d) {
                     return std::pair{max_tolerable_thermal_noise(cv, s2, d, k0),
                                      max_tolerable_thermal_noise(dv, s2, d, k0)};
                   });
}

ComparisonMap loss_frontier_map(const std::vector<double>& sigma2_grid,
                                const std::vector<double>& n_grid, double k0,
                                const RateModel& cv, const RateModel& dv) {
  return build_map("sigma2", "nth", sigma2_grid, n_grid, [&](double s2, double n) {
    return std::pair{max_distance(cv, s2, n, k0), max_distance(dv, s2, n, k0)};
  });
}

ComparisonMap kmap(const std::vector<double>& distance_grid, const std::vector<double>& n_grid,
                   double sigma2, double k0, const RateModel& cv, const RateModel& dv) {
  if (!(k0 >= 0.0)) throw DomainError("rate threshold k0 must be >= 0");
  auto floor_k0 = [&](double k) { return k >= k0 ? k : 0.0; };
  return build_map("distance_km", "nth", distance_grid, n_grid, [&](double d, double n) {
    return std::pair{floor_k0(cv.rate(d, n, sigma2)), floor_k0(dv.rate(d, n, sigma2))};
  });
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace qkdrate
