#include <cmath>
#include <string>

#include "doctest.h"
#include "qkdrate/errors.hpp"
#include "qkdrate/sweep.hpp"
#include "qkdrate/toml_subset.hpp"

using namespace qkdrate;
using nlohmann::json;

namespace {

std::size_t column(const SweepTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("TOML subset") {
  const json doc = parse_toml_subset(R"(# comment
protocols = ["bb84", "sqz_hom"]   # trailing
threads = 2

[fixed]
eta = 0.5
nth = 1e-2
optimize_va = true
excess_noise_placement = "at_input"
big = 1_000

[[axes]]
name = "nth"
min = 0
max = 0.5
count = 3
)");
  CHECK(doc["protocols"] == json({"bb84", "sqz_hom"}));
  CHECK(doc["threads"] == 2);
  CHECK(doc["fixed"]["eta"] == 0.5);
  CHECK(doc["fixed"]["nth"] == 0.01);
  CHECK(doc["fixed"]["optimize_va"] == true);
  CHECK(doc["fixed"]["excess_noise_placement"] == "at_input");
  CHECK(doc["fixed"]["big"] == 1000);
  REQUIRE(doc["axes"].size() == 1);
  CHECK(doc["axes"][0]["count"] == 3);
  CHECK_THROWS_AS(parse_toml_subset("a = "), ConfigError);
  CHECK_THROWS_AS(parse_toml_subset("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(parse_toml_subset("a = \"open"), ConfigError);
  CHECK_THROWS_AS(parse_toml_subset("a = 1 2"), ConfigError);
  CHECK_THROWS_AS(parse_toml_subset("[t]\n[t]"), ConfigError);
}

TEST_CASE("axis values") {
  AxisSpec lin{"eta", 0.1, 0.9, 5, AxisScale::Linear};
  const auto v = lin.values();
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 0.1);
  CHECK(v.back() == 0.9);
  CHECK(v[2] == doctest::Approx(0.5));
  AxisSpec lg{"nth", 1e-4, 1.0, 5, AxisScale::Log};
  CHECK(lg.values()[1] == doctest::Approx(1e-3));
  CHECK(lg.values().back() == 1.0);
}

TEST_CASE("config validation") {
  auto ok = json::parse(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5}})");
  CHECK_NOTHROW(parse_sweep_config(ok));
  auto check_bad = [](const char* text) {
    CHECK_THROWS_AS(parse_sweep_config(json::parse(text)), ConfigError);
  };
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5}, "extra": 1})");
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "colour": 1}})");
  check_bad(R"({"protocols": ["bb85"], "fixed": {"eta": 0.5}})");
  CHECK_THROWS_AS(run_sweep(parse_sweep_config(json::parse(R"({"protocols": ["bb84"]})"))), ConfigError);
  CHECK_THROWS_AS(run_sweep(parse_sweep_config(json::parse(R"({"fixed": {"eta": 0.5}})"))), ConfigError);
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "distance_km": 3}})");
  check_bad(R"({"protocols": ["bb84"], "axes": [{"name": "eta", "min": 0, "max": 1, "count": 1}]})");
  check_bad(R"({"protocols": ["bb84"], "axes": [{"name": "nth", "min": 0, "max": 1, "count": 3, "scale": "log"}], "fixed": {"eta": 0.5}})");
  check_bad(R"({"protocols": ["bb84"], "axes": [{"name": "speed", "min": 0, "max": 1, "count": 3}], "fixed": {"eta": 0.5}})");
  check_bad(R"({"protocols": ["bb84"], "axes": [{"name": "eta", "min": 0, "max": 1, "count": 3}], "fixed": {"eta": 0.5}})");
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "reconciliation_efficiency": 0.95}})");
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "mu": 3, "optimize_va": true}})");
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "excess_noise_placement": "middle"}})");
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 1.5}})");
  check_bad(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5}, "output": {"png": "x"}})");
  CHECK_NOTHROW(parse_sweep_config(json::parse(
      R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "reconciliation_efficiency": 1.0}})")));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_optional(std::nullopt) == "none");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
}

TEST_CASE("single-cell sweep") {
  const SweepConfig cfg = parse_sweep_config(json::parse(
      R"({"protocols": ["bb84", "six_state", "sqz_hom"], "fixed": {"eta": 1, "nth": 0, "squeezing_db": 15}})"));
  const SweepTable t = run_sweep(cfg);
  REQUIRE(t.rows.size() == 1);
  const auto& row = t.rows[0];
  CHECK(std::stod(row[column(t, "bb84")]) == 0.5);
  CHECK(std::stod(row[column(t, "six_state")]) == 0.5);
  CHECK(std::abs(std::stod(row[column(t, "sqz_hom")]) - 4.98289) < 1e-5);
  CHECK(row[column(t, "k_lower")] == "inf");
  CHECK(row[column(t, "bb84_norm")] == "0");
  CHECK(row[column(t, "error")].empty());
  CHECK(std::stod(row[column(t, "k_tilde")]) == doctest::Approx(1.0 - 0.5 / 4.982892142329661));
  CHECK(t.header.size() == row.size());
}

TEST_CASE("grid ordering and in-row failures") {
  const SweepConfig cfg = parse_sweep_config(json::parse(R"({
    "protocols": ["bb84", "gg02"],
    "axes": [{"name": "eta", "min": 0, "max": 1, "count": 3},
             {"name": "nth", "min": 0, "max": 0.2, "count": 2}],
    "fixed": {"mu": 4}
  })"));
  const SweepTable t = run_sweep(cfg);
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[0][column(t, "eta")] == "0");
  CHECK(t.rows[1][column(t, "nth")] == "0.20000000000000001");
  CHECK(t.rows[2][column(t, "eta")] == "0.5");
  // eta = 0, N = 0 is 0/0 for the DV QBER; recorded, not fatal.
  CHECK(t.failed_cells == 1);
  CHECK_FALSE(t.rows[0][column(t, "error")].empty());
  CHECK(t.rows[0][column(t, "bb84")] == "none");
  CHECK(std::stod(t.rows[0][column(t, "gg02")]) < 1e-12);
  CHECK(t.rows[1][column(t, "error")].empty());
  // Entanglement-breaking cells carry no normalized rate.
  CHECK(t.rows[1][column(t, "entanglement_breaking")] == "1");
  CHECK(t.rows[1][column(t, "bb84_norm")] == "none");
}

TEST_CASE("sweep determinism across thread counts") {
  json doc = json::parse(R"({
    "protocols": ["bb84", "n6s", "sqz_hom", "nsqz_hom"],
    "axes": [{"name": "distance_km", "min": 0, "max": 60, "count": 4},
             {"name": "nth", "min": 0.001, "max": 0.1, "count": 3, "scale": "log"}],
    "fixed": {"sigma2": 0.01, "optimize_va": true}
  })");
  doc["threads"] = 1;
  const std::string one = to_csv(run_sweep(parse_sweep_config(doc)));
  doc["threads"] = 3;
  const std::string three = to_csv(run_sweep(parse_sweep_config(doc)));
  CHECK(one == three);
}

TEST_CASE("config hash and metadata") {
  const json a = json::parse(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "nth": 0.1}})");
  const json b = json::parse(R"({"fixed": {"nth": 0.1, "eta": 0.5}, "protocols": ["bb84"]})");
  const SweepConfig ca = parse_sweep_config(a);
  CHECK(config_hash(ca) == config_hash(parse_sweep_config(b)));
  CHECK(config_hash(ca).size() == 16);
  const json c = json::parse(R"({"protocols": ["bb84"], "fixed": {"eta": 0.5, "nth": 0.2}})");
  CHECK(config_hash(ca) != config_hash(parse_sweep_config(c)));
  const json meta = sweep_metadata(ca, run_sweep(ca));
  CHECK(meta["version"] == "0.1.0");
  CHECK(meta["config_hash"] == config_hash(ca));
  CHECK(meta["rows"] == 1);
  CHECK(meta["columns"][0] == "index");
}

TEST_CASE("comparison tables") {
  const SweepConfig cfg = parse_sweep_config(json::parse(R"({
    "axes": [{"name": "sigma2", "min": 0, "max": 4, "count": 2},
             {"name": "nth", "min": 0, "max": 0.01, "count": 2}],
    "fixed": {"k0": 0.001}
  })"));
  const SweepTable t = run_comparison(cfg, "loss-frontier");
  CHECK(t.header[5] == "l_tilde");
  CHECK(t.header[3] == "sqz_hom_max_distance_km");
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[3][5] == "none");
  CHECK(t.rows[0][5] != "none");
  CHECK_THROWS_AS(run_comparison(cfg, "kmap"), ConfigError);
  CHECK_THROWS_AS(run_comparison(cfg, "other"), ConfigError);
  const SweepConfig no_k0 = parse_sweep_config(json::parse(R"({
    "axes": [{"name": "sigma2", "min": 0, "max": 0.01, "count": 2},
             {"name": "nth", "min": 0, "max": 6, "count": 2}]
  })"));
  CHECK_THROWS_AS(run_comparison(no_k0, "loss-frontier"), ConfigError);
}
