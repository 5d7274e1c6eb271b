#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "rec/scenario.hpp"

using namespace rec;

namespace {

const char* kMinimal = R"({
  "horizon": {"steps": 2, "dt": 1.0},
  "tariffs": {"import": 0.16, "export": 0.04, "import_local": 0.13, "export_local": 0.05,
              "alpha": 0.00109488, "beta": 0.1096737},
  "members": [{"id": "a", "base_load": [0, 0], "generation": [0, 0], "conn_limit": 5}]
})";

ScenarioError::Kind kind_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.kind();
  }
  FAIL("expected a ScenarioError");
  return ScenarioError::Kind::io;
}

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("minimal scenario") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.num_members() == 1);
  CHECK(s.steps() == 2);
  CHECK(s.tariffs.import == std::vector<double>{0.16, 0.16});
}

TEST_CASE("export price at or above import price is rejected") {
  CHECK(kind_of(with(kMinimal, "\"export\": 0.04", "\"export\": [0.04, 0.16]")) ==
        ScenarioError::Kind::validation);
  CHECK(kind_of(with(kMinimal, "\"export_local\": 0.05", "\"export_local\": 0.2")) ==
        ScenarioError::Kind::validation);
}

TEST_CASE("malformed and invalid inputs") {
  CHECK(kind_of("{ not json") == ScenarioError::Kind::parse);
  CHECK(kind_of(with(kMinimal, "\"conn_limit\": 5", "\"conn_limit\": 0")) == ScenarioError::Kind::validation);
  CHECK(kind_of(with(kMinimal, "\"base_load\": [0, 0]", "\"base_load\": [0]")) != ScenarioError::Kind::io);
  CHECK(kind_of(with(kMinimal, "\"conn_limit\": 5",
                     "\"conn_limit\": 5, \"appliances\": [{\"window\": [1, 0], \"energy\": 3, "
                     "\"power_max\": 2}]")) == ScenarioError::Kind::infeasible_appliance);
  CHECK(kind_of(with(kMinimal, "\"conn_limit\": 5",
                     "\"conn_limit\": 5, \"battery\": {\"charge_max\": 5, \"discharge_max\": 5, "
                     "\"capacity\": 14, \"soc_init\": 20}")) == ScenarioError::Kind::validation);
  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL("expected io error");
  } catch (const ScenarioError& e) {
    CHECK(e.kind() == ScenarioError::Kind::io);
  }
}

TEST_CASE("bi-hourly tariffs are accepted") {
  Scenario s = parse_scenario(kMinimal);
  s.horizon = Horizon{24, 1.0};
  s.tariffs = default_tariffs(s.horizon);
  s.members[0].base_load.assign(24, 0.0);
  s.members[0].generation.assign(24, 0.0);
  CHECK_NOTHROW(validate(s));
  CHECK(s.tariffs.import[12] == 0.16);
  CHECK(s.tariffs.import[23] == 0.08);
  CHECK(s.tariffs.import[2] == 0.08);
  CHECK(s.tariffs.alpha == 0.00109488);
  CHECK(s.tariffs.beta == 0.1096737);
}

TEST_CASE("generator is deterministic") {
  SyntheticSpec spec{1, 2, Horizon{24, 1.0}, PvLevel::low, 0.5};
  CHECK(generate_synthetic(spec) == generate_synthetic(spec));
  spec.seed = 2;
  CHECK_FALSE(generate_synthetic(spec) == generate_synthetic(SyntheticSpec{1, 2, Horizon{24, 1.0}, PvLevel::low, 0.5}));
}

TEST_CASE("battery penetration") {
  SyntheticSpec spec{3, 10, Horizon{24, 1.0}, PvLevel::high, 0.0};
  for (const auto& m : generate_synthetic(spec).members) CHECK_FALSE(m.battery.has_value());
  spec.battery_penetration = 0.5;
  int count = 0;
  for (const auto& m : generate_synthetic(spec).members) {
    if (m.battery) {
      ++count;
      CHECK(m.battery->soc_init == doctest::Approx(0.5 * m.battery->capacity));
    }
  }
  CHECK(count == 5);
}

TEST_CASE("large generated scenarios validate and round-trip") {
  for (PvLevel pv : {PvLevel::high, PvLevel::low}) {
    const Scenario s = generate_synthetic(SyntheticSpec{7, 55, Horizon{24, 1.0}, pv, 0.5});
    CHECK_NOTHROW(validate(s));
    for (const auto& m : s.members) {
      for (const auto& a : m.appliances) {
        double cap = 0.0;
        for (int w : a.window) cap += w * a.power_max * s.dt();
        CHECK(a.energy <= cap + 1e-12);
      }
    }
    CHECK(parse_scenario(scenario_to_json(s)) == s);
    CHECK(scenario_fingerprint(parse_scenario(scenario_to_json(s))) == scenario_fingerprint(s));
  }
}

TEST_CASE("file round trip") {
  const Scenario s = generate_synthetic(SyntheticSpec{4, 3, Horizon{24, 1.0}, PvLevel::high, 0.5});
  const auto path = std::filesystem::temp_directory_path() / "rec_test_scenario_roundtrip.json";
  save_scenario(s, path.string());
  CHECK(load_scenario(path.string()) == s);
  std::filesystem::remove(path);
}

TEST_CASE("generation is zero at night and without installed PV") {
  SyntheticSpec spec{11, 55, Horizon{24, 1.0}, PvLevel::high, 0.5};
  for (const auto& m : generate_synthetic(spec).members) {
    for (int t = 0; t < 24; ++t) {
      CHECK(m.generation[t] >= 0.0);
      if (t < 6 || t >= 20) CHECK(m.generation[t] == 0.0);
    }
  }
  spec.pv_capacity_max = 0.0;
  for (const auto& m : generate_synthetic(spec).members) {
    CHECK(m.generation == std::vector<double>(24, 0.0));
  }
}

TEST_CASE("without_member drops exactly one member") {
  const Scenario s = generate_synthetic(SyntheticSpec{5, 4, Horizon{24, 1.0}, PvLevel::high, 0.5});
  const Scenario r = without_member(s, 1);
  CHECK(r.num_members() == 3);
  CHECK(r.members[1] == s.members[2]);
  CHECK_THROWS(without_member(s, 4));
}
