#include "rec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw ScenarioError(ScenarioError::Kind::validation, what);
}

void check_profile(const std::vector<double>& values, int steps, const std::string& where) {
  if (static_cast<int>(values.size()) != steps) {
    fail(where + ": expected " + std::to_string(steps) + " values, got " +
         std::to_string(values.size()));
  }
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (!std::isfinite(values[t]) || values[t] < 0.0) {
      fail(where + "[" + std::to_string(t) + "] must be a finite value >= 0");
    }
  }
}

// Hour of day at the middle of slot t.
double hour_of_day(int t, double dt) { return std::fmod((t + 0.5) * dt, 24.0); }

}  // namespace

void validate(const Scenario& s) {
  const int T = s.horizon.steps;
  if (T < 1) fail("horizon.steps must be >= 1");
  if (!(s.horizon.dt > 0.0) || !std::isfinite(s.horizon.dt)) fail("horizon.dt must be > 0");

  const Tariffs& tf = s.tariffs;
  check_profile(tf.import, T, "tariffs.import");
  check_profile(tf.export_, T, "tariffs.export");
  check_profile(tf.import_local, T, "tariffs.import_local");
  check_profile(tf.export_local, T, "tariffs.export_local");
  for (int t = 0; t < T; ++t) {
    if (!(tf.export_[t] < tf.import[t])) {
      fail("tariffs: export price must be below import price at t=" + std::to_string(t));
    }
    if (!(tf.export_local[t] < tf.import_local[t])) {
      fail("tariffs: local export price must be below local import price at t=" +
           std::to_string(t));
    }
  }
  if (!std::isfinite(tf.alpha) || tf.alpha < 0.0) fail("tariffs.alpha must be >= 0");
  if (!std::isfinite(tf.beta) || tf.beta < 0.0) fail("tariffs.beta must be >= 0");

  if (s.members.empty()) fail("scenario must contain at least one member");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.members.size(); ++i) {
    const MemberAssets& m = s.members[i];
    const std::string where = "member '" + (m.id.empty() ? std::to_string(i) : m.id) + "'";
    if (m.id.empty()) fail(where + ": id must not be empty");
    if (!ids.insert(m.id).second) fail(where + ": duplicate id");
    check_profile(m.base_load, T, where + ".base_load");
    check_profile(m.generation, T, where + ".generation");
    if (!(m.conn_limit > 0.0) || !std::isfinite(m.conn_limit)) {
      fail(where + ".conn_limit must be > 0");
    }
    for (std::size_t a = 0; a < m.appliances.size(); ++a) {
      const Appliance& app = m.appliances[a];
      const std::string aw = where + ".appliances[" + std::to_string(a) + "]";
      if (static_cast<int>(app.window.size()) != T) fail(aw + ".window: wrong length");
      int slots = 0;
      for (int w : app.window) {
        if (w != 0 && w != 1) fail(aw + ".window entries must be 0 or 1");
        slots += w;
      }
      if (!std::isfinite(app.energy) || app.energy < 0.0) fail(aw + ".energy must be >= 0");
      if (!std::isfinite(app.power_max) || app.power_max < 0.0) {
        fail(aw + ".power_max must be >= 0");
      }
      const double reachable = slots * app.power_max * s.horizon.dt;
      if (app.energy > reachable * (1.0 + 1e-12) + 1e-12) {
        throw ScenarioError(ScenarioError::Kind::infeasible_appliance,
                            aw + ": energy " + std::to_string(app.energy) +
                                " kWh exceeds the window capacity " + std::to_string(reachable) +
                                " kWh");
      }
    }
    if (m.battery) {
      const Battery& b = *m.battery;
      if (!(b.charge_max >= 0.0) || !(b.discharge_max >= 0.0) || !(b.capacity >= 0.0)) {
        fail(where + ".battery: power and capacity limits must be >= 0");
      }
      if (!(b.soc_init >= 0.0 && b.soc_init <= b.capacity)) {
        fail(where + ".battery.soc_init must lie in [0, capacity]");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::vector<double> read_series(const json& j, const char* key, int steps, const std::string& where) {
  if (!j.contains(key)) fail(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(std::max(steps, 0)), v.get<double>());
  return v.get<std::vector<double>>();
}

json appliance_json(const Appliance& a) {
  return json{{"name", a.name}, {"window", a.window}, {"energy", a.energy}, {"power_max", a.power_max}};
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::parse, std::string("malformed scenario: ") + e.what());
  }

  Scenario s;
  try {
    const json& h = root.at("horizon");
    s.horizon.steps = h.value("steps", 24);
    s.horizon.dt = h.value("dt", 1.0);
    const int T = s.horizon.steps;

    const json& tf = root.at("tariffs");
    s.tariffs.import = read_series(tf, "import", T, "tariffs");
    s.tariffs.export_ = read_series(tf, "export", T, "tariffs");
    s.tariffs.import_local = read_series(tf, "import_local", T, "tariffs");
    s.tariffs.export_local = read_series(tf, "export_local", T, "tariffs");
    s.tariffs.alpha = tf.at("alpha").get<double>();
    s.tariffs.beta = tf.at("beta").get<double>();

    for (const json& jm : root.at("members")) {
      MemberAssets m;
      m.id = jm.at("id").get<std::string>();
      m.base_load = read_series(jm, "base_load", T, "member " + m.id);
      m.generation = read_series(jm, "generation", T, "member " + m.id);
      m.conn_limit = jm.at("conn_limit").get<double>();
      if (jm.contains("appliances")) {
        for (const json& ja : jm.at("appliances")) {
          Appliance a;
          a.name = ja.value("name", std::string{});
          a.window = ja.at("window").get<std::vector<int>>();
          a.energy = ja.at("energy").get<double>();
          a.power_max = ja.at("power_max").get<double>();
          m.appliances.push_back(std::move(a));
        }
      }
      if (jm.contains("battery") && !jm.at("battery").is_null()) {
        const json& jb = jm.at("battery");
        Battery b;
        b.charge_max = jb.at("charge_max").get<double>();
        b.discharge_max = jb.at("discharge_max").get<double>();
        b.capacity = jb.at("capacity").get<double>();
        b.soc_init = jb.at("soc_init").get<double>();
        m.battery = b;
      }
      s.members.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw ScenarioError(ScenarioError::Kind::parse, std::string("scenario schema error: ") + e.what());
  }

  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ScenarioError::Kind::io, "cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string scenario_to_json(const Scenario& s, int indent) {
  json root;
  root["horizon"] = {{"steps", s.horizon.steps}, {"dt", s.horizon.dt}};
  root["tariffs"] = {{"import", s.tariffs.import},
                     {"export", s.tariffs.export_},
                     {"import_local", s.tariffs.import_local},
                     {"export_local", s.tariffs.export_local},
                     {"alpha", s.tariffs.alpha},
                     {"beta", s.tariffs.beta}};
  json members = json::array();
  for (const MemberAssets& m : s.members) {
    json jm;
    jm["id"] = m.id;
    jm["base_load"] = m.base_load;
    jm["generation"] = m.generation;
    jm["conn_limit"] = m.conn_limit;
    json apps = json::array();
    for (const Appliance& a : m.appliances) apps.push_back(appliance_json(a));
    jm["appliances"] = apps;
    if (m.battery) {
      jm["battery"] = {{"charge_max", m.battery->charge_max},
                       {"discharge_max", m.battery->discharge_max},
                       {"capacity", m.battery->capacity},
                       {"soc_init", m.battery->soc_init}};
    } else {
      jm["battery"] = nullptr;
    }
    members.push_back(std::move(jm));
  }
  root["members"] = members;
  return root.dump(indent);
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError(ScenarioError::Kind::io, "cannot write scenario file '" + path + "'");
  out << scenario_to_json(s) << '\n';
}

std::uint64_t scenario_fingerprint(const Scenario& s) {
  // FNV-1a
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : scenario_to_json(s, -1)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Tariffs default_tariffs(const Horizon& horizon) {
  Tariffs tf;
  const auto T = static_cast<std::size_t>(horizon.steps);
  tf.import.resize(T);
  tf.export_.resize(T);
  tf.import_local.resize(T);
  tf.export_local.resize(T);
  for (int t = 0; t < horizon.steps; ++t) {
    const double h = hour_of_day(t, horizon.dt);
    const bool off_peak = h >= 21.0 || h < 4.0;
    tf.import[t] = off_peak ? 0.08 : 0.16;
    tf.export_[t] = off_peak ? 0.02 : 0.04;
    tf.import_local[t] = off_peak ? 0.065 : 0.13;
    tf.export_local[t] = off_peak ? 0.032 : 0.05;
  }
  tf.alpha = 0.00109488;
  tf.beta = 0.1096737;
  return tf;
}

// ---------------------------------------------------------------------------
// Synthetic communities

namespace {

double gaussian_bump(double h, double centre, double width) {
  const double d = h - centre;
  return std::exp(-d * d / (2.0 * width * width));
}

std::vector<int> window_where(const Horizon& hz, auto&& predicate) {
  std::vector<int> w(static_cast<std::size_t>(hz.steps), 0);
  for (int t = 0; t < hz.steps; ++t) w[t] = predicate(hour_of_day(t, hz.dt)) ? 1 : 0;
  if (std::count(w.begin(), w.end(), 1) == 0) std::fill(w.begin(), w.end(), 1);
  return w;
}

}  // namespace

Scenario generate_synthetic(const SyntheticSpec& spec) {
  if (spec.members < 1) throw std::invalid_argument("generate_synthetic: members must be >= 1");
  if (spec.horizon.steps < 1 || !(spec.horizon.dt > 0.0)) {
    throw std::invalid_argument("generate_synthetic: invalid horizon");
  }
  if (!(spec.battery_penetration >= 0.0 && spec.battery_penetration <= 1.0)) {
    throw std::invalid_argument("generate_synthetic: battery_penetration must lie in [0, 1]");
  }
  if (!(spec.pv_capacity_max >= 0.0)) throw std::invalid_argument("generate_synthetic: negative PV capacity");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const Horizon& hz = spec.horizon;
  const int T = hz.steps;
  const double dt = hz.dt;

  Scenario s;
  s.horizon = hz;
  s.tariffs = default_tariffs(hz);

  const double day_factor = spec.pv_level == PvLevel::high ? 1.0 : 0.12;

  for (int i = 0; i < spec.members; ++i) {
    MemberAssets m;
    m.id = "m" + std::to_string(i + 1);

    // Base load: double-peak daily curve with multiplicative noise.
    const double daily_energy = uniform(5.0, 16.0);
    const double morning = uniform(6.5, 8.5);
    const double evening = uniform(18.5, 20.5);
    std::vector<double> shape(static_cast<std::size_t>(T));
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
      const double h = hour_of_day(t, dt);
      double v = 0.35 + 0.8 * gaussian_bump(h, morning, 1.2) + 1.2 * gaussian_bump(h, evening, 1.8);
      v *= 1.0 + 0.2 * (2.0 * unit(rng) - 1.0);
      shape[t] = std::max(0.0, v) * dt;
      total += shape[t];
    }
    const double days = T * dt / 24.0;
    m.base_load.resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) m.base_load[t] = total > 0.0 ? daily_energy * days * shape[t] / total : 0.0;

    // PV: bell over daylight hours, scaled by installed capacity (kWc).
    const double capacity = uniform(0.0, spec.pv_capacity_max);
    m.generation.assign(static_cast<std::size_t>(T), 0.0);
    for (int t = 0; t < T; ++t) {
      const double h = hour_of_day(t, dt);
      if (h <= 6.0 || h >= 20.0) continue;
      const double bell = std::pow(std::sin(M_PI * (h - 6.0) / 14.0), 1.5);
      const double cloud = spec.pv_level == PvLevel::high ? uniform(0.9, 1.0) : uniform(0.5, 1.0);
      m.generation[t] = capacity * 0.75 * bell * day_factor * cloud * dt;
    }

    // Flexible appliances drawn from a small catalogue.
    std::vector<int> kinds{0, 1, 2, 3};
    std::shuffle(kinds.begin(), kinds.end(), rng);
    const int count = 1 + static_cast<int>(unit(rng) * 3.0);
    for (int k = 0; k < std::min(count, 3); ++k) {
      Appliance a;
      switch (kinds[k]) {
        case 0:
          a.name = "washing_machine";
          a.energy = 1.5;
          a.power_max = 2.0;
          a.window = window_where(hz, [](double h) { return h >= 8.0 && h < 22.0; });
          break;
        case 1:
          a.name = "dishwasher";
          a.energy = 1.2;
          a.power_max = 1.8;
          a.window = window_where(hz, [](double h) { return h >= 12.0 || h < 6.0; });
          break;
        case 2:
          a.name = "ev";
          a.energy = uniform(4.0, 12.0);
          a.power_max = 3.7;
          a.window = window_where(hz, [](double h) { return h >= 18.0 || h < 7.0 || (h >= 10.0 && h < 15.0); });
          break;
        default:
          a.name = "heat_pump";
          a.energy = uniform(3.0, 9.0);
          a.power_max = 2.5;
          a.window = std::vector<int>(static_cast<std::size_t>(T), 1);
          break;
      }
      const double reachable =
          std::accumulate(a.window.begin(), a.window.end(), 0) * a.power_max * dt;
      a.energy = std::min(a.energy * days, 0.8 * reachable);
      m.appliances.push_back(std::move(a));
    }
    s.members.push_back(std::move(m));
  }

  // Batteries on floor(p * N) members.
  std::vector<int> order(static_cast<std::size_t>(spec.members));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int with_battery = static_cast<int>(std::floor(spec.battery_penetration * spec.members + 1e-9));
  for (int k = 0; k < with_battery; ++k) {
    Battery b;
    b.capacity = 14.0;
    b.charge_max = 5.0;
    b.discharge_max = 5.0;
    b.soc_init = 0.5 * b.capacity;
    s.members[order[k]].battery = b;
  }

  for (MemberAssets& m : s.members) {
    double flexible_power = 0.0;
    for (const Appliance& a : m.appliances) flexible_power += a.power_max;
    if (m.battery) flexible_power += m.battery->charge_max;
    const double peak_base = *std::max_element(m.base_load.begin(), m.base_load.end());
    m.conn_limit = flexible_power * dt + peak_base + 2.0 * dt;
  }

  validate(s);
  return s;
}

Scenario without_member(const Scenario& scenario, int excluded) {
  if (excluded < 0 || excluded >= scenario.num_members()) {
    throw std::out_of_range("without_member: index out of range");
  }
  Scenario out = scenario;
  out.members.erase(out.members.begin() + excluded);
  return out;
}

}  // namespace rec
