#include "rec/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rec {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string num(double v, int digits = 12) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string exact(double v) { return num(v, 17); }

std::string opt(const std::optional<double>& v) { return v ? num(*v) : "n/a"; }

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Rows of a CSV file keyed by header name.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  const std::vector<std::string> header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) throw std::runtime_error(path.string() + ": ragged row");
    std::map<std::string, std::string> row;
    for (std::size_t k = 0; k < header.size(); ++k) row[header[k]] = cells[k];
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

std::string profile_csv(const RunResult& r) {
  const bool d2 = r.profile.design == Design::d2;
  std::string out = "member,id,t,s,soc,l_pos,l_neg,p_bar";
  if (d2) out += ",i_com,e_com,i_ret,e_ret";
  out += "\n";
  for (int i = 0; i < r.profile.num_members(); ++i) {
    const Schedule& s = r.profile.schedules[i];
    for (int t = 0; t < r.steps; ++t) {
      out += std::to_string(i) + "," + r.member_ids[i] + "," + std::to_string(t) + ",";
      out += (s.s.empty() ? "" : exact(s.s[t])) + "," + (s.soc.empty() ? "" : exact(s.soc[t])) + ",";
      out += exact(s.l_pos[t]) + "," + exact(s.l_neg[t]) + "," + exact(s.p_bar);
      if (d2) {
        out += "," + exact(s.i_com[t]) + "," + exact(s.e_com[t]) + "," + exact(s.i_ret[t]) + "," + exact(s.e_ret[t]);
      }
      out += "\n";
    }
  }
  return out;
}

std::string appliances_csv(const RunResult& r) {
  std::string out = "member,appliance,t,x\n";
  for (int i = 0; i < r.profile.num_members(); ++i) {
    const Schedule& s = r.profile.schedules[i];
    for (std::size_t a = 0; a < s.x.size(); ++a) {
      for (int t = 0; t < r.steps; ++t) {
        out += std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(t) + "," + exact(s.x[a][t]) + "\n";
      }
    }
  }
  return out;
}

std::string bills_csv(const RunResult& r) {
  const bool keyed = r.billing && *r.billing != Billing::cp;
  std::string out = "member,id,bill,key\n";
  for (std::size_t i = 0; i < r.bills.size(); ++i) {
    out += std::to_string(i) + "," + r.member_ids[i] + "," + num(r.bills[i]) + "," +
           (keyed ? num(r.keys.K[i]) : "") + "\n";
  }
  return out;
}

std::string kpi_csv(const RunResult& r) {
  std::string out = "metric,value\n";
  out += "total_cost," + num(r.kpis.total_cost) + "\n";
  out += "scr," + opt(r.kpis.scr) + "\n";
  out += "ssr," + opt(r.kpis.ssr) + "\n";
  out += "par_plus," + opt(r.kpis.par_plus) + "\n";
  out += "par_minus," + opt(r.kpis.par_minus) + "\n";
  out += "inefficiency," + opt(r.kpis.inefficiency) + "\n";
  return out;
}

std::string trace_csv(const EquilibriumReport& g) {
  std::string out = "outer,inner_sweeps,outer_residual,inner_residual,balance_residual,total_cost\n";
  for (const IterationRecord& rec : g.trace) {
    out += std::to_string(rec.outer) + "," + std::to_string(rec.inner_sweeps) + "," + num(rec.outer_residual) + "," +
           num(rec.inner_residual) + "," + num(rec.balance_residual) + "," + num(rec.total_cost) + "\n";
  }
  return out;
}

std::string prices_csv(const std::vector<double>& pi) {
  std::string out = "t,pi\n";
  for (std::size_t t = 0; t < pi.size(); ++t) out += std::to_string(t) + "," + num(pi[t]) + "\n";
  return out;
}

std::optional<double> opt_from_json(const ojson& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::benchmark: return "benchmark";
    case Mode::central: return "central";
    case Mode::game: return "game";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "benchmark") return Mode::benchmark;
  if (t == "central") return Mode::central;
  if (t == "game") return Mode::game;
  throw std::invalid_argument("unknown mode '" + text + "' (expected benchmark, central or game)");
}

std::string summary_json(const RunResult& r) {
  ojson j;
  j["mode"] = to_string(r.mode);
  j["design"] = to_string(r.design);
  j["billing"] = r.billing ? ojson(to_string(*r.billing)) : ojson(nullptr);
  j["scenario_fingerprint"] = hex(r.fingerprint);
  j["seed"] = r.seed ? ojson(*r.seed) : ojson(nullptr);
  j["members"] = r.member_ids.size();
  j["steps"] = r.steps;
  j["status"] = r.status;
  j["total_cost"] = r.cost.total;
  j["cost"] = {{"retail_import", r.cost.retail_import}, {"retail_export", r.cost.retail_export},
               {"local_import", r.cost.local_import},   {"local_export", r.cost.local_export},
               {"upstream", r.cost.upstream},           {"peak", r.cost.peak}};
  j["kpi"] = {{"scr", opt_json(r.kpis.scr)},
              {"ssr", opt_json(r.kpis.ssr)},
              {"par_plus", opt_json(r.kpis.par_plus)},
              {"par_minus", opt_json(r.kpis.par_minus)},
              {"inefficiency", opt_json(r.kpis.inefficiency)}};
  j["social_optimum"] = opt_json(r.social_optimum);
  j["bill_sum"] = [&] {
    double s = 0.0;
    for (double b : r.bills) s += b;
    return s;
  }();
  j["keys_fallback"] = r.keys.fallback;
  if (r.game) {
    const EquilibriumReport& g = *r.game;
    ojson gj;
    gj["tau"] = g.tau;
    gj["converged"] = g.converged;
    gj["outer_iterations"] = g.outer_iterations;
    gj["inner_sweeps"] = g.inner_sweeps;
    gj["outer_residual"] = g.outer_residual;
    gj["inner_residual"] = g.inner_residual;
    if (r.design == Design::d2) {
      gj["balance_residual"] = g.balance_residual;
      gj["price_residual"] = g.price_residual;
      gj["pi"] = g.pi;
    }
    j["game"] = gj;
  }
  if (r.audit) {
    j["audit"] = {{"max_improvement", r.audit->max_improvement}, {"balance_residual", r.audit->balance_residual}};
  }
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

void write_run(const RunResult& r, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  write_text(root / "profile.csv", profile_csv(r));
  write_text(root / "appliances.csv", appliances_csv(r));
  write_text(root / "bills.csv", bills_csv(r));
  write_text(root / "kpi.csv", kpi_csv(r));
  if (r.game) {
    write_text(root / "trace.csv", trace_csv(*r.game));
    if (r.design == Design::d2) write_text(root / "prices.csv", prices_csv(r.game->pi));
  }
  write_text(root / "summary.json", summary_json(r));
}

CommunityProfile read_profile(const std::string& dir, const Scenario& scenario) {
  const fs::path root(dir);
  const auto rows = read_csv(root / "profile.csv");
  const int N = scenario.num_members();
  const int T = scenario.steps();
  if (static_cast<int>(rows.size()) != N * T) {
    throw std::runtime_error((root / "profile.csv").string() + ": expected " + std::to_string(N * T) + " rows");
  }
  CommunityProfile p;
  p.design = !rows.empty() && rows.front().count("i_com") ? Design::d2 : Design::d1;
  p.schedules.resize(N);
  for (int i = 0; i < N; ++i) {
    Schedule& s = p.schedules[i];
    const MemberAssets& m = scenario.members[i];
    s.x.assign(m.appliances.size(), std::vector<double>(T, 0.0));
    if (m.battery) {
      s.s.assign(T, 0.0);
      s.soc.assign(T, 0.0);
    }
    s.l_pos.assign(T, 0.0);
    s.l_neg.assign(T, 0.0);
    if (p.design == Design::d2) {
      for (auto* v : {&s.i_com, &s.e_com, &s.i_ret, &s.e_ret}) v->assign(T, 0.0);
    }
  }
  for (const auto& row : rows) {
    const int i = to_int(row.at("member"));
    const int t = to_int(row.at("t"));
    if (i < 0 || i >= N || t < 0 || t >= T) throw std::runtime_error("profile.csv: index out of range");
    Schedule& s = p.schedules[i];
    if (row.at("id") != scenario.members[i].id) throw std::runtime_error("profile.csv: member ids do not match");
    if (!s.s.empty()) {
      s.s[t] = to_double(row.at("s"));
      s.soc[t] = to_double(row.at("soc"));
    }
    s.l_pos[t] = to_double(row.at("l_pos"));
    s.l_neg[t] = to_double(row.at("l_neg"));
    s.p_bar = to_double(row.at("p_bar"));
    if (p.design == Design::d2) {
      s.i_com[t] = to_double(row.at("i_com"));
      s.e_com[t] = to_double(row.at("e_com"));
      s.i_ret[t] = to_double(row.at("i_ret"));
      s.e_ret[t] = to_double(row.at("e_ret"));
    }
  }
  for (const auto& row : read_csv(root / "appliances.csv")) {
    const int i = to_int(row.at("member"));
    const int a = to_int(row.at("appliance"));
    const int t = to_int(row.at("t"));
    if (i < 0 || i >= N || a < 0 || a >= static_cast<int>(p.schedules[i].x.size()) || t < 0 || t >= T) {
      throw std::runtime_error("appliances.csv: index out of range");
    }
    p.schedules[i].x[a][t] = to_double(row.at("x"));
  }
  return p;
}

StoredRun read_run(const std::string& dir) {
  const fs::path root(dir);
  const ojson j = ojson::parse(read_text(root / "summary.json"));
  StoredRun r;
  r.dir = dir;
  r.mode = j.at("mode").get<std::string>();
  r.design = j.at("design").get<std::string>();
  r.billing = j.at("billing").is_null() ? "" : j.at("billing").get<std::string>();
  r.fingerprint = j.at("scenario_fingerprint").get<std::string>();
  r.total_cost = j.at("total_cost").get<double>();
  const ojson& k = j.at("kpi");
  r.scr = opt_from_json(k, "scr");
  r.ssr = opt_from_json(k, "ssr");
  r.par_plus = opt_from_json(k, "par_plus");
  r.par_minus = opt_from_json(k, "par_minus");
  r.inefficiency = opt_from_json(k, "inefficiency");
  for (const auto& row : read_csv(root / "bills.csv")) {
    r.member_ids.push_back(row.at("id"));
    r.bills.push_back(to_double(row.at("bill")));
  }
  return r;
}

std::string compare_runs(const std::vector<StoredRun>& runs) {
  if (runs.empty()) throw std::invalid_argument("compare: no runs given");
  for (const StoredRun& r : runs) {
    if (r.fingerprint != runs.front().fingerprint) {
      throw std::invalid_argument("compare: " + r.dir + " was produced from a different scenario");
    }
    if (r.member_ids != runs.front().member_ids) {
      throw std::invalid_argument("compare: " + r.dir + " has a different member set");
    }
  }
  std::ostringstream out;
  out << "run,mode,design,billing,total_cost,scr,ssr,par_plus,par_minus,inefficiency\n";
  for (const StoredRun& r : runs) {
    out << r.dir << "," << r.mode << "," << r.design << "," << (r.billing.empty() ? "-" : r.billing) << ","
        << num(r.total_cost) << "," << opt(r.scr) << "," << opt(r.ssr) << "," << opt(r.par_plus) << ","
        << opt(r.par_minus) << "," << opt(r.inefficiency) << "\n";
  }

  const StoredRun* bench = nullptr;
  const StoredRun* d1 = nullptr;
  const StoredRun* d2 = nullptr;
  for (const StoredRun& r : runs) {
    if (r.mode == "benchmark" && !bench) bench = &r;
    if (r.mode == "central" && r.design == "d1" && !d1) d1 = &r;
    if (r.mode == "central" && r.design == "d2" && !d2) d2 = &r;
  }
  if (bench || d1 || d2) {
    out << "\nordering\n";
    if (d1 && bench) {
      out << "D1 <= benchmark: " << (d1->total_cost <= bench->total_cost + 1e-6 ? "yes" : "no")
          << ", savings " << num(bench->total_cost != 0.0 ? (bench->total_cost - d1->total_cost) / bench->total_cost : 0.0)
          << "\n";
    }
    if (d2 && d1) out << "D2 <= D1: " << (d2->total_cost <= d1->total_cost + 1e-6 ? "yes" : "no") << "\n";
    if (d2 && bench) {
      out << "D2 <= benchmark: " << (d2->total_cost <= bench->total_cost + 1e-6 ? "yes" : "no") << ", savings "
          << num(bench->total_cost != 0.0 ? (bench->total_cost - d2->total_cost) / bench->total_cost : 0.0) << "\n";
    }
  }

  if (runs.size() > 1) {
    const StoredRun& ref = runs.front();
    out << "\nmember,id,reference_bill";
    for (std::size_t k = 1; k < runs.size(); ++k) out << ",delta_" << k << ",delta_pct_" << k;
    out << "\n";
    for (std::size_t i = 0; i < ref.bills.size(); ++i) {
      out << i << "," << ref.member_ids[i] << "," << num(ref.bills[i]);
      for (std::size_t k = 1; k < runs.size(); ++k) {
        const double d = runs[k].bills[i] - ref.bills[i];
        out << "," << num(d) << "," << (ref.bills[i] != 0.0 ? num(100.0 * d / std::abs(ref.bills[i])) : "n/a");
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace rec
