#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qkdrate/capacity.hpp"
#include "qkdrate/compare.hpp"
#include "qkdrate/errors.hpp"
#include "qkdrate/fock_oracle.hpp"
#include "qkdrate/protocols.hpp"
#include "qkdrate/sweep.hpp"

namespace {

using nlohmann::json;
using namespace qkdrate;

constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;
constexpr int kExitOracle = 4;

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

struct LinkArgs {
  std::optional<double> eta;
  std::optional<double> distance_km;
  double attenuation = kFiberLossDbPerKm;
  double nth = 0.0;

  void add(CLI::App* cmd) {
    auto* e = cmd->add_option("--eta", eta, "Channel transmissivity")->check(CLI::Range(0.0, 1.0));
    auto* d = cmd->add_option("--distance-km", distance_km, "Fibre length")
                  ->check(CLI::NonNegativeNumber);
    e->excludes(d);
    cmd->add_option("--attenuation", attenuation, "Fibre loss in dB/km")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nth", nth, "Mean thermal photon number")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  }

  [[nodiscard]] double resolved_eta() const {
    if (eta) return *eta;
    if (distance_km) return LinkModel(*distance_km, attenuation).eta();
    throw ConfigError("give --eta or --distance-km");
  }
};

json bounds_json(const CapacityBounds& b) {
  return {{"k_lower", num(b.lower)},
          {"k_upper", opt(b.upper)},
          {"entanglement_breaking", b.entanglement_breaking}};
}

json diagnostics_json(const KeyRateResult& r) {
  if (const auto* s = std::get_if<DvChannelStats>(&r.diagnostics)) {
    return {{"lambda", s->lambda}, {"p_success", s->p_success}, {"q_x", s->q_x.value()},
            {"q_y", s->q_y.value()}, {"q_z", s->q_z.value()}, {"gamma", s->gamma}};
  }
  if (const auto* c = std::get_if<CvCovariance>(&r.diagnostics)) {
    return {{"a", c->a()}, {"b", c->b()}, {"c", c->c()},
            {"lambda1", c->lambda1()}, {"lambda2", c->lambda2()}};
  }
  return nullptr;
}

int run_config_command(const std::string& path, const std::string& kind) {
  const SweepConfig cfg = parse_sweep_config(load_config_document(path));
  const SweepTable table = kind == "sweep" ? run_sweep(cfg) : run_comparison(cfg, kind);
  write_outputs(cfg, table, kind);
  std::cout << kind << ": " << table.rows.size() << " rows, " << table.failed_cells
            << " failed -> " << cfg.csv_path << '\n';
  return table.failed_cells == 0 ? 0 : kExitCompute;
}

std::vector<double> steps(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic QKD key rates over thermal-loss and phase-noise channels"};
  app.require_subcommand(1);

  // rate
  auto* rate = app.add_subcommand("rate", "Evaluate one protocol at one channel point");
  std::string protocol_text;
  LinkArgs rate_link;
  double sigma2 = 0.0;
  std::optional<double> mu;
  std::optional<double> squeezing_db;
  bool optimize_va = false;
  double max_squeezing_db = kDefaultMaxSqueezingDb;
  std::optional<double> xi_b;
  bool optimize_xi = false;
  std::optional<double> q;
  bool optimize_q = false;
  std::string placement = "at_output";
  double v_phi = 0.0;
  rate->add_option("--protocol", protocol_text, "bb84, six_state, nbb84, n6s, sqz_hom, nsqz_hom, gg02")
      ->required();
  rate_link.add(rate);
  rate->add_option("--sigma2", sigma2, "Phase-noise variance (rad^2)")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  auto* mu_opt = rate->add_option("--mu", mu, "Source variance (vacuum = 1)");
  auto* sq_opt = rate->add_option("--squeezing-db", squeezing_db, "Source squeezing in dB");
  auto* va_opt = rate->add_flag("--optimize-va", optimize_va, "Optimize the modulation variance");
  mu_opt->excludes(sq_opt)->excludes(va_opt);
  sq_opt->excludes(va_opt);
  rate->add_option("--max-squeezing-db", max_squeezing_db, "Cap for the source")->capture_default_str();
  auto* xi_opt = rate->add_option("--xi-b", xi_b, "Trusted noise for nsqz_hom")
                     ->check(CLI::NonNegativeNumber);
  rate->add_flag("--optimize-xi", optimize_xi, "Optimize the trusted noise (default)")
      ->excludes(xi_opt);
  auto* q_opt = rate->add_option("--q", q, "Preprocessing flip probability")
                    ->check(CLI::Range(0.0, 0.5));
  rate->add_flag("--optimize-q", optimize_q, "Optimize the flip probability (default)")
      ->excludes(q_opt);
  rate->add_option("--placement", placement, "Phase excess noise: at_output or at_input")->capture_default_str()
      ->check(CLI::IsMember({"at_output", "at_input"}));
  rate->add_option("--v-phi", v_phi, "Estimation phase variance (CV side)")->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Capacity bounds of a thermal-loss channel");
  LinkArgs bounds_link;
  bounds_link.add(bounds);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, "JSON or TOML config")->required();

  // compare
  auto* compare = app.add_subcommand("compare", "CV against DV comparison maps");
  std::string compare_kind;
  std::string compare_config;
  compare->add_option("kind", compare_kind, "kmap, noise-frontier or loss-frontier")
      ->required()
      ->check(CLI::IsMember({"kmap", "noise-frontier", "loss-frontier"}));
  compare->add_option("--config", compare_config, "JSON or TOML config")->required();

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "Closed forms against the Fock-space oracle");
  double max_dev = 1e-6;
  oracle->add_option("--max-dev", max_dev, "Largest tolerated absolute deviation")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*rate) {
      const auto proto = parse_protocol(protocol_text);
      if (!proto) throw ConfigError("unknown protocol '" + protocol_text + "'");
      const ThermalLossChannel ch(rate_link.resolved_eta(), rate_link.nth);
      ProtocolSettings s;
      s.mu_max = std::pow(10.0, max_squeezing_db / 10.0);
      s.optimize_va = optimize_va;
      if (mu) s.mu = *mu;
      if (squeezing_db) s.mu = std::pow(10.0, *squeezing_db / 10.0);
      s.xi_b = xi_b;
      s.q = q;
      s.placement = placement == "at_input" ? NoisePlacement::AtInput : NoisePlacement::AtOutput;
      s.v_phi = v_phi;
      const KeyRateResult r = evaluate(*proto, s, ch, PhaseNoise(sigma2));
      const json out = {{"protocol", std::string(protocol_column(*proto))},
                        {"eta", ch.eta()},
                        {"nth", ch.n_th()},
                        {"sigma2", sigma2},
                        {"raw_rate", num(r.raw_rate)},
                        {"rate", num(r.rate)},
                        {"optimal_param", opt(r.optimal_param)},
                        {"diagnostics", diagnostics_json(r)},
                        {"bounds", bounds_json(plob_bounds(ch))}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*bounds) {
      const ThermalLossChannel ch(bounds_link.resolved_eta(), bounds_link.nth);
      json out = bounds_json(plob_bounds(ch));
      out["eta"] = ch.eta();
      out["nth"] = ch.n_th();
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*sweep) return run_config_command(sweep_config, "sweep");
    if (*compare) return run_config_command(compare_config, compare_kind);
    if (*oracle) {
      const OracleDeviation thermal =
          oracle_check(steps(0.1, 0.9, 9), {0.01, 0.1, 0.5, 1.0, 2.0}, {0.0});
      const OracleDeviation dephased = oracle_check(
          steps(0.1, 0.9, 5), {0.01, 0.1, 0.5, 1.0, 2.0}, {0.0, 0.01, 0.04});
      auto line = [](const char* name, double a, double b) {
        std::printf("%-12s %.3e\n", name, std::max(a, b));
      };
      line("q_z", thermal.q_z, dephased.q_z);
      line("q_x", thermal.q_x, dephased.q_x);
      line("p_success", thermal.p_success, dephased.p_success);
      line("lambda", thermal.lambda, dephased.lambda);
      line("x_basis", thermal.x_basis, dephased.x_basis);
      std::printf("%-12s %.3e\n", "choi_min",
                  std::min(thermal.choi_min_eigenvalue, dephased.choi_min_eigenvalue));
      const double worst = std::max(thermal.max(), dephased.max());
      std::printf("max deviation %.3e (limit %.1e): %s\n", worst, max_dev,
                  worst <= max_dev ? "ok" : "FAIL");
      return worst <= max_dev ? 0 : kExitOracle;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return 0;
}
