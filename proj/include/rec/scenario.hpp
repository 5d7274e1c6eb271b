#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rec {

/// Day-ahead horizon: `steps` slots of `dt` hours each.
struct Horizon {
  int steps = 24;
  double dt = 1.0;

  bool operator==(const Horizon&) const = default;
};

/// Commodity prices per time step (money/kWh) and network tariffs.
struct Tariffs {
  std::vector<double> import;        // retail import price
  std::vector<double> export_;       // retail export price
  std::vector<double> import_local;  // price paid for energy bought from the community pool
  std::vector<double> export_local;  // price received for energy sold to the community pool
  double alpha = 0.0;                // upstream grid, money/kWh^2
  double beta = 0.0;                 // peak penalty, money/kW

  bool operator==(const Tariffs&) const = default;
};

/// Fully modular flexible load: `energy` kWh spread over the slots where
/// `window[t] == 1`, at most `power_max` kW per slot.
struct Appliance {
  std::string name;
  std::vector<int> window;
  double energy = 0.0;
  double power_max = 0.0;

  bool operator==(const Appliance&) const = default;
};

/// Lossless storage. Power is positive when charging.
struct Battery {
  double charge_max = 0.0;     // kW
  double discharge_max = 0.0;  // kW
  double capacity = 0.0;       // kWh
  double soc_init = 0.0;       // kWh, also the required final state of charge

  bool operator==(const Battery&) const = default;
};

struct MemberAssets {
  std::string id;
  std::vector<double> base_load;   // kWh per step
  std::vector<double> generation;  // kWh per step
  std::vector<Appliance> appliances;
  std::optional<Battery> battery;
  double conn_limit = 0.0;  // kWh per step

  bool operator==(const MemberAssets&) const = default;
};

struct Scenario {
  Horizon horizon;
  Tariffs tariffs;
  std::vector<MemberAssets> members;

  int num_members() const { return static_cast<int>(members.size()); }
  int steps() const { return horizon.steps; }
  double dt() const { return horizon.dt; }

  bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { parse, validation, infeasible_appliance, io };

  ScenarioError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Throws ScenarioError naming the offending member/field.
void validate(const Scenario& scenario);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scenario, int indent = 2);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Stable 64-bit fingerprint of the canonical serialization.
std::uint64_t scenario_fingerprint(const Scenario& scenario);

/// Bi-hourly commodity tariffs: off-peak between 21h and 4h, peak otherwise.
Tariffs default_tariffs(const Horizon& horizon);

enum class PvLevel { high, low };

struct SyntheticSpec {
  std::uint64_t seed = 1;
  int members = 55;
  Horizon horizon;
  PvLevel pv_level = PvLevel::high;
  double battery_penetration = 0.5;
  double pv_capacity_max = 10.0;  // kWc, capacities are uniform on [0, max]
};

Scenario generate_synthetic(const SyntheticSpec& spec);

/// Copy of `scenario` without member `excluded`.
Scenario without_member(const Scenario& scenario, int excluded);

}  // namespace rec
