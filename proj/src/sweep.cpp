#include "qkdrate/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qkdrate/capacity.hpp"
#include "qkdrate/errors.hpp"
#include "qkdrate/protocols.hpp"
#include "qkdrate/toml_subset.hpp"

namespace qkdrate {

namespace {

using nlohmann::json;

const std::set<std::string> kAxisNames{"eta", "distance_km", "nth", "sigma2", "squeezing_db"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a table/object");
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

double non_negative(const json& v, const std::string& key) {
  const double x = number(v, key);
  if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("'" + key + "' must be finite and >= 0");
  return x;
}

AxisSpec parse_axis(const json& a) {
  reject_unknown(a, {"name", "min", "max", "count", "scale"}, "axis");
  for (const char* k : {"name", "min", "max", "count"}) {
    if (!a.contains(k)) throw ConfigError(std::string("axis is missing '") + k + "'");
  }
  AxisSpec ax;
  ax.name = text(a["name"], "name");
  if (!kAxisNames.count(ax.name)) throw ConfigError("unknown axis name '" + ax.name + "'");
  ax.min = number(a["min"], "min");
  ax.max = number(a["max"], "max");
  if (!a["count"].is_number_integer()) throw ConfigError("'count' must be an integer");
  ax.count = a["count"].get<int>();
  if (ax.count < 2) throw ConfigError("axis '" + ax.name + "' needs count >= 2");
  if (a.contains("scale")) {
    const std::string s = text(a["scale"], "scale");
    if (s == "linear") {
      ax.scale = AxisScale::Linear;
    } else if (s == "log") {
      ax.scale = AxisScale::Log;
    } else {
      throw ConfigError("axis scale must be 'linear' or 'log'");
    }
  }
  if (!std::isfinite(ax.min) || !std::isfinite(ax.max)) {
    throw ConfigError("axis bounds must be finite");
  }
  if (ax.scale == AxisScale::Log && !(ax.min > 0.0 && ax.max > 0.0)) {
    throw ConfigError("log axis '" + ax.name + "' needs positive bounds");
  }
  return ax;
}

FixedParams parse_fixed(const json& f) {
  reject_unknown(f,
                 {"eta", "distance_km", "nth", "sigma2", "squeezing_db", "mu",
                  "max_squeezing_db", "optimize_va", "xi_b", "optimize_xi", "q", "optimize_q",
                  "k0", "attenuation_db_per_km", "excess_noise_placement", "v_phi",
                  "dv_includes_v_phi", "reconciliation_efficiency"},
                 "fixed");
  FixedParams p;
  if (f.contains("eta")) {
    p.eta = number(f["eta"], "eta");
    if (!(*p.eta >= 0.0 && *p.eta <= 1.0)) throw ConfigError("'eta' must lie in [0, 1]");
  }
  if (f.contains("distance_km")) p.distance_km = non_negative(f["distance_km"], "distance_km");
  if (p.eta && p.distance_km) throw ConfigError("give either 'eta' or 'distance_km', not both");
  if (f.contains("nth")) p.nth = non_negative(f["nth"], "nth");
  if (f.contains("sigma2")) p.sigma2 = non_negative(f["sigma2"], "sigma2");
  if (f.contains("squeezing_db")) p.squeezing_db = non_negative(f["squeezing_db"], "squeezing_db");
  if (f.contains("mu")) {
    p.mu = number(f["mu"], "mu");
    if (!(*p.mu >= 1.0)) throw ConfigError("'mu' must be >= 1");
  }
  if (p.mu && p.squeezing_db) throw ConfigError("give either 'mu' or 'squeezing_db', not both");
  if (f.contains("max_squeezing_db")) {
    p.max_squeezing_db = non_negative(f["max_squeezing_db"], "max_squeezing_db");
  }
  if (f.contains("optimize_va")) p.optimize_va = boolean(f["optimize_va"], "optimize_va");
  if (p.optimize_va && p.mu) throw ConfigError("'mu' conflicts with optimize_va = true");
  if (f.contains("xi_b")) p.xi_b = non_negative(f["xi_b"], "xi_b");
  if (f.contains("optimize_xi")) {
    const bool opt = boolean(f["optimize_xi"], "optimize_xi");
    if (opt && p.xi_b) throw ConfigError("'xi_b' conflicts with optimize_xi = true");
    if (!opt && !p.xi_b) p.xi_b = 0.0;
  }
  if (f.contains("q")) {
    p.q = number(f["q"], "q");
    if (!(*p.q >= 0.0 && *p.q <= 0.5)) throw ConfigError("'q' must lie in [0, 0.5]");
  }
  if (f.contains("optimize_q")) {
    const bool opt = boolean(f["optimize_q"], "optimize_q");
    if (opt && p.q) throw ConfigError("'q' conflicts with optimize_q = true");
    if (!opt && !p.q) p.q = 0.0;
  }
  if (f.contains("k0")) p.k0 = non_negative(f["k0"], "k0");
  if (f.contains("attenuation_db_per_km")) {
    p.attenuation_db_per_km = number(f["attenuation_db_per_km"], "attenuation_db_per_km");
    if (!(p.attenuation_db_per_km > 0.0)) {
      throw ConfigError("'attenuation_db_per_km' must be > 0");
    }
  }
  if (f.contains("excess_noise_placement")) {
    const std::string s = text(f["excess_noise_placement"], "excess_noise_placement");
    if (s == "at_output") {
      p.placement = NoisePlacement::AtOutput;
    } else if (s == "at_input") {
      p.placement = NoisePlacement::AtInput;
    } else {
      throw ConfigError("excess_noise_placement must be 'at_output' or 'at_input'");
    }
  }
  if (f.contains("v_phi")) p.v_phi = non_negative(f["v_phi"], "v_phi");
  if (f.contains("dv_includes_v_phi")) {
    p.dv_includes_v_phi = boolean(f["dv_includes_v_phi"], "dv_includes_v_phi");
  }
  if (f.contains("reconciliation_efficiency") &&
      number(f["reconciliation_efficiency"], "reconciliation_efficiency") != 1.0) {
    throw ConfigError("only reconciliation_efficiency = 1 is supported");
  }
  return p;
}

// Parameters of one grid cell after axes override the fixed block.
struct CellPoint {
  double eta = 1.0;
  double distance_km = 0.0;
  double nth = 0.0;
  double sigma2 = 0.0;
  std::optional<double> squeezing_db;
};

CellPoint resolve(const SweepConfig& cfg, const std::vector<double>& axis_values) {
  const FixedParams& f = cfg.fixed;
  CellPoint c;
  std::optional<double> eta = f.eta;
  std::optional<double> dist = f.distance_km;
  c.nth = f.nth;
  c.sigma2 = f.sigma2;
  c.squeezing_db = f.squeezing_db;
  if (f.mu) c.squeezing_db = 10.0 * std::log10(*f.mu);
  for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
    const std::string& n = cfg.axes[i].name;
    const double v = axis_values[i];
    if (n == "eta") {
      eta = v;
    } else if (n == "distance_km") {
      dist = v;
    } else if (n == "nth") {
      c.nth = v;
    } else if (n == "sigma2") {
      c.sigma2 = v;
    } else {
      c.squeezing_db = v;
    }
  }
  if (eta) {
    c.eta = *eta;
    c.distance_km = c.eta > 0.0 ? LinkModel::from_eta(c.eta, f.attenuation_db_per_km).distance_km()
                                : std::numeric_limits<double>::infinity();
  } else {
    c.distance_km = *dist;
    c.eta = LinkModel(c.distance_km, f.attenuation_db_per_km).eta();
  }
  return c;
}

ProtocolSettings settings_for(const FixedParams& f, const CellPoint& c) {
  ProtocolSettings s;
  s.optimize_va = f.optimize_va;
  s.mu_max = std::pow(10.0, f.max_squeezing_db / 10.0);
  if (c.squeezing_db) {
    const double mu = std::pow(10.0, *c.squeezing_db / 10.0);
    if (f.optimize_va) {
      s.mu_max = mu;
    } else {
      s.mu = mu;
    }
  }
  s.xi_b = f.xi_b;
  s.q = f.q;
  s.placement = f.placement;
  s.v_phi = f.v_phi;
  s.dv_includes_v_phi = f.dv_includes_v_phi;
  return s;
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

std::vector<std::vector<double>> cartesian(const std::vector<AxisSpec>& axes) {
  std::vector<std::vector<double>> cells{{}};
  for (const AxisSpec& ax : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : cells) {
      for (double v : ax.values()) {
        auto row = prefix;
        row.push_back(v);
        next.push_back(std::move(row));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

std::optional<Protocol> pick(const std::vector<Protocol>& ps, Protocol preferred, bool dv) {
  if (std::find(ps.begin(), ps.end(), preferred) != ps.end()) return preferred;
  for (Protocol p : ps) {
    if (is_dv(p) == dv) return p;
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> AxisSpec::values() const {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    if (i == 0) {
      out[i] = min;
    } else if (i == count - 1) {
      out[i] = max;
    } else if (scale == AxisScale::Log) {
      out[i] = std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
    } else {
      out[i] = min + t * (max - min);
    }
  }
  return out;
}

nlohmann::json load_config_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string body = buf.str();
  const bool toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  if (toml) return parse_toml_subset(body);
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
}

SweepConfig parse_sweep_config(const nlohmann::json& doc) {
  reject_unknown(doc, {"axes", "protocols", "fixed", "output", "threads"}, "config");
  SweepConfig cfg;
  cfg.canonical = doc;
  if (doc.contains("axes")) {
    if (!doc["axes"].is_array()) throw ConfigError("'axes' must be an array");
    std::set<std::string> seen;
    for (const json& a : doc["axes"]) {
      cfg.axes.push_back(parse_axis(a));
      if (!seen.insert(cfg.axes.back().name).second) {
        throw ConfigError("axis '" + cfg.axes.back().name + "' appears twice");
      }
    }
    if (seen.count("eta") && seen.count("distance_km")) {
      throw ConfigError("axes 'eta' and 'distance_km' are mutually exclusive");
    }
  }
  if (doc.contains("protocols")) {
    if (!doc["protocols"].is_array()) throw ConfigError("'protocols' must be an array");
    for (const json& p : doc["protocols"]) {
      const std::string name = text(p, "protocols");
      const auto proto = parse_protocol(name);
      if (!proto) throw ConfigError("unknown protocol '" + name + "'");
      if (std::find(cfg.protocols.begin(), cfg.protocols.end(), *proto) != cfg.protocols.end()) {
        throw ConfigError("protocol '" + name + "' listed twice");
      }
      cfg.protocols.push_back(*proto);
    }
  }
  cfg.fixed = parse_fixed(doc.value("fixed", json::object()));
  const bool link_axis = std::any_of(cfg.axes.begin(), cfg.axes.end(), [](const AxisSpec& a) {
    return a.name == "eta" || a.name == "distance_km";
  });
  if (link_axis && (cfg.fixed.eta || cfg.fixed.distance_km)) {
    throw ConfigError("the link is set both by an axis and by a fixed value");
  }
  for (const AxisSpec& a : cfg.axes) {
    if (a.name == "eta" && !(a.min >= 0.0 && a.max <= 1.0 && a.max >= 0.0 && a.min <= 1.0)) {
      throw ConfigError("eta axis must stay in [0, 1]");
    }
    if (a.name != "eta" && (a.min < 0.0 || a.max < 0.0)) {
      throw ConfigError("axis '" + a.name + "' must be >= 0");
    }
    if (a.name == "squeezing_db" && cfg.fixed.mu) {
      throw ConfigError("squeezing_db axis conflicts with fixed 'mu'");
    }
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, {"csv", "metadata"}, "output");
    if (o.contains("csv")) cfg.csv_path = text(o["csv"], "csv");
    if (o.contains("metadata")) cfg.metadata_path = text(o["metadata"], "metadata");
  }
  if (doc.contains("threads")) {
    const json& th = doc["threads"];
    if (!th.is_number_integer() || th.get<long long>() < 0) throw ConfigError("'threads' must be >= 0");
    cfg.threads = th.get<unsigned>();
  }
  return cfg;
}

std::string config_hash(const SweepConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : cfg.canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : "none";
}

SweepTable run_sweep(const SweepConfig& cfg) {
  if (cfg.protocols.empty()) throw ConfigError("'protocols' must list at least one protocol");
  const bool link_axis = std::any_of(cfg.axes.begin(), cfg.axes.end(), [](const AxisSpec& a) {
    return a.name == "eta" || a.name == "distance_km";
  });
  if (!link_axis && !cfg.fixed.eta && !cfg.fixed.distance_km) {
    throw ConfigError("the link needs 'eta' or 'distance_km', as an axis or a fixed value");
  }
  SweepTable table;
  table.header = {"index", "eta", "distance_km", "nth", "sigma2", "squeezing_db"};
  for (Protocol p : cfg.protocols) {
    const std::string c(protocol_column(p));
    for (const char* suffix : {"_raw", "", "_param", "_norm"}) table.header.push_back(c + suffix);
  }
  for (const char* c : {"k_lower", "k_upper", "entanglement_breaking", "k_tilde", "error"}) {
    table.header.emplace_back(c);
  }
  const auto cv_pick = pick(cfg.protocols, Protocol::SqzHom, false);
  const auto dv_pick = pick(cfg.protocols, Protocol::SixState, true);

  const auto grid = cartesian(cfg.axes);
  table.rows.resize(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t idx) {
        const CellPoint c = resolve(cfg, grid[idx]);
        std::vector<std::string>& row = table.rows[idx];
        row = {std::to_string(idx), format_number(c.eta), format_number(c.distance_km),
               format_number(c.nth), format_number(c.sigma2), format_optional(c.squeezing_db)};
        std::string error;
        std::optional<CapacityBounds> bounds;
        std::map<Protocol, double> clamped;
        try {
          const ThermalLossChannel ch(c.eta, c.nth);
          bounds = plob_bounds(ch);
          const PhaseNoise pn(c.sigma2);
          const ProtocolSettings settings = settings_for(cfg.fixed, c);
          for (Protocol p : cfg.protocols) {
            try {
              const KeyRateResult r = evaluate(p, settings, ch, pn);
              clamped[p] = r.rate;
              std::optional<double> norm;
              if (bounds->upper && *bounds->upper > 0.0) norm = normalize_rate(r, *bounds);
              row.insert(row.end(), {format_number(r.raw_rate), format_number(r.rate),
                                     format_optional(r.optimal_param), format_optional(norm)});
            } catch (const std::exception& e) {
              if (error.empty()) error = std::string(protocol_column(p)) + ": " + e.what();
              row.insert(row.end(), 4, "none");
            }
          }
        } catch (const std::exception& e) {
          error = e.what();
          row.resize(6 + 4 * cfg.protocols.size(), "none");
        }
        row.push_back(bounds ? format_number(bounds->lower) : "none");
        row.push_back(bounds ? format_optional(bounds->upper) : "none");
        row.push_back(bounds ? (bounds->entanglement_breaking ? "1" : "0") : "none");
        std::optional<double> k_tilde;
        if (cv_pick && dv_pick && clamped.count(*cv_pick) && clamped.count(*dv_pick)) {
          auto floor_k0 = [&](double k) { return k >= cfg.fixed.k0 ? k : 0.0; };
          k_tilde = relative_difference(floor_k0(clamped[*cv_pick]), floor_k0(clamped[*dv_pick]));
        }
        row.push_back(format_optional(k_tilde));
        row.push_back(sanitize(error));
      },
      cfg.threads);
  for (const auto& row : table.rows) {
    if (!row.back().empty()) ++table.failed_cells;
  }
  return table;
}

SweepTable run_comparison(const SweepConfig& cfg, const std::string& kind) {
  std::pair<std::string, std::string> want;
  if (kind == "kmap") {
    want = {"distance_km", "nth"};
  } else if (kind == "noise-frontier") {
    want = {"sigma2", "distance_km"};
  } else if (kind == "loss-frontier") {
    want = {"sigma2", "nth"};
  } else {
    throw ConfigError("unknown comparison '" + kind + "'");
  }
  if (cfg.axes.size() != 2 || cfg.axes[0].name != want.first ||
      cfg.axes[1].name != want.second) {
    throw ConfigError(kind + " needs exactly two axes: " + want.first + ", " + want.second);
  }
  if (kind != "kmap" && !(cfg.fixed.k0 > 0.0)) throw ConfigError(kind + " needs fixed.k0 > 0");

  RateModel cv = default_cv_model();
  RateModel dv = default_dv_model();
  if (!cfg.protocols.empty()) {
    if (cfg.protocols.size() != 2 || is_dv(cfg.protocols[0]) || !is_dv(cfg.protocols[1])) {
      throw ConfigError("comparison protocols must be [cv, dv]");
    }
    cv.protocol = cfg.protocols[0];
    dv.protocol = cfg.protocols[1];
  }
  CellPoint base;
  base.squeezing_db = cfg.fixed.mu ? std::optional(10.0 * std::log10(*cfg.fixed.mu))
                                   : cfg.fixed.squeezing_db;
  FixedParams f = cfg.fixed;
  // Without an explicit source the CV side optimizes V_A under the cap.
  if (!base.squeezing_db) f.optimize_va = true;
  cv.settings = settings_for(f, base);
  dv.settings = settings_for(f, base);
  cv.attenuation_db_per_km = dv.attenuation_db_per_km = f.attenuation_db_per_km;

  const std::vector<double> xs = cfg.axes[0].values();
  const std::vector<double> ys = cfg.axes[1].values();
  ComparisonMap map;
  if (kind == "kmap") {
    map = kmap(xs, ys, f.sigma2, f.k0, cv, dv);
  } else if (kind == "noise-frontier") {
    map = noise_frontier_map(xs, ys, f.k0, cv, dv);
  } else {
    map = loss_frontier_map(xs, ys, f.k0, cv, dv);
  }
  const std::string value_name = kind == "kmap" ? "rate" : kind == "noise-frontier"
                                                               ? "max_nth"
                                                               : "max_distance_km";
  const std::string metric = kind == "kmap" ? "k_tilde" : kind == "noise-frontier" ? "n_tilde"
                                                                                    : "l_tilde";
  SweepTable table;
  table.header = {"index", map.x_name, map.y_name,
                  std::string(protocol_column(cv.protocol)) + "_" + value_name,
                  std::string(protocol_column(dv.protocol)) + "_" + value_name, metric, "error"};
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const MapCell& c = map.cells[i];
    const bool ok = c.error.empty();
    table.rows.push_back({std::to_string(i), format_number(c.x), format_number(c.y),
                          ok ? format_number(c.cv) : "none", ok ? format_number(c.dv) : "none",
                          format_optional(c.metric), sanitize(c.error)});
    if (!ok) ++table.failed_cells;
  }
  return table;
}

std::string to_csv(const SweepTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

nlohmann::json sweep_metadata(const SweepConfig& cfg, const SweepTable& table,
                              const std::string& kind) {
  json axes = json::array();
  for (const AxisSpec& a : cfg.axes) {
    axes.push_back({{"name", a.name},
                    {"min", a.min},
                    {"max", a.max},
                    {"count", a.count},
                    {"scale", a.scale == AxisScale::Log ? "log" : "linear"},
                    {"values", a.values()}});
  }
  json protocols = json::array();
  for (Protocol p : cfg.protocols) protocols.push_back(std::string(protocol_column(p)));
  return {{"tool", "qkdrate"},
          {"version", kToolVersion},
          {"kind", kind},
          {"config_hash", config_hash(cfg)},
          {"axes", axes},
          {"protocols", protocols},
          {"columns", table.header},
          {"rows", table.rows.size()},
          {"failed_cells", table.failed_cells},
          {"csv", cfg.csv_path}};
}

void write_outputs(const SweepConfig& cfg, const SweepTable& table, const std::string& kind) {
  if (cfg.csv_path.empty()) throw ConfigError("output.csv is required");
  {
    std::ofstream out(cfg.csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + cfg.csv_path + "'");
    out << to_csv(table);
  }
  if (!cfg.metadata_path.empty()) {
    std::ofstream out(cfg.metadata_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + cfg.metadata_path + "'");
    out << sweep_metadata(cfg, table, kind).dump(2) << '\n';
  }
}

}  // namespace qkdrate
