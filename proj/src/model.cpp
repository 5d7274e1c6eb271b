#include "rec/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rec {

std::string to_string(Design design) { return design == Design::d1 ? "d1" : "d2"; }

Design parse_design(const std::string& text) {
  if (text == "d1" || text == "D1" || text == "1") return Design::d1;
  if (text == "d2" || text == "D2" || text == "2") return Design::d2;
  throw std::invalid_argument("unknown design '" + text + "' (expected d1 or d2)");
}

VariableLayout::VariableLayout(const MemberAssets& member, Design design, const Horizon& horizon)
    : design_(design),
      steps_(horizon.steps),
      num_appliances_(static_cast<int>(member.appliances.size())),
      has_battery_(member.battery.has_value()) {
  int offset = num_appliances_ * steps_;
  if (has_battery_) {
    s_ = offset;
    soc_ = offset + steps_;
    offset += 2 * steps_;
  }
  l_pos_ = offset;
  offset += steps_;
  l_neg_ = offset;
  offset += steps_;
  p_bar_ = offset;
  offset += 1;
  if (design_ == Design::d2) {
    i_com_ = offset;
    e_com_ = offset + steps_;
    i_ret_ = offset + 2 * steps_;
    e_ret_ = offset + 3 * steps_;
    offset += 4 * steps_;
  }
  size_ = offset;
}

std::vector<std::string> VariableLayout::names() const {
  std::vector<std::string> out(static_cast<std::size_t>(size_));
  auto series = [&](const std::string& base, int first) {
    for (int t = 0; t < steps_; ++t) out[first + t] = base + "[" + std::to_string(t) + "]";
  };
  for (int a = 0; a < num_appliances_; ++a) series("x" + std::to_string(a), x(a, 0));
  if (has_battery_) {
    series("s", s(0));
    series("soc", soc(0));
  }
  series("l_pos", l_pos(0));
  series("l_neg", l_neg(0));
  out[p_bar_] = "p_bar";
  if (design_ == Design::d2) {
    series("i_com", i_com(0));
    series("e_com", e_com(0));
    series("i_ret", i_ret(0));
    series("e_ret", e_ret(0));
  }
  return out;
}

Schedule unpack(const VariableLayout& L, const qp::Vector& theta) {
  if (theta.size() != L.size()) throw std::invalid_argument("unpack: vector size does not match layout");
  const int T = L.steps();
  auto slice = [&](int first) {
    return std::vector<double>(theta.data() + first, theta.data() + first + T);
  };
  Schedule s;
  for (int a = 0; a < L.num_appliances(); ++a) s.x.push_back(slice(L.x(a, 0)));
  if (L.has_battery()) {
    s.s = slice(L.s(0));
    s.soc = slice(L.soc(0));
  }
  s.l_pos = slice(L.l_pos(0));
  s.l_neg = slice(L.l_neg(0));
  s.p_bar = theta[L.p_bar()];
  if (L.design() == Design::d2) {
    s.i_com = slice(L.i_com(0));
    s.e_com = slice(L.e_com(0));
    s.i_ret = slice(L.i_ret(0));
    s.e_ret = slice(L.e_ret(0));
  }
  return s;
}

qp::Vector pack(const VariableLayout& L, const Schedule& s) {
  const int T = L.steps();
  qp::Vector theta = qp::Vector::Zero(L.size());
  auto put = [&](int first, const std::vector<double>& v, const char* what) {
    if (static_cast<int>(v.size()) != T) throw std::invalid_argument(std::string("pack: bad length for ") + what);
    for (int t = 0; t < T; ++t) theta[first + t] = v[t];
  };
  if (static_cast<int>(s.x.size()) != L.num_appliances()) throw std::invalid_argument("pack: appliance count mismatch");
  for (int a = 0; a < L.num_appliances(); ++a) put(L.x(a, 0), s.x[a], "x");
  if (L.has_battery()) {
    put(L.s(0), s.s, "s");
    put(L.soc(0), s.soc, "soc");
  }
  put(L.l_pos(0), s.l_pos, "l_pos");
  put(L.l_neg(0), s.l_neg, "l_neg");
  theta[L.p_bar()] = s.p_bar;
  if (L.design() == Design::d2) {
    put(L.i_com(0), s.i_com, "i_com");
    put(L.e_com(0), s.e_com, "e_com");
    put(L.i_ret(0), s.i_ret, "i_ret");
    put(L.e_ret(0), s.e_ret, "e_ret");
  }
  return theta;
}

Schedule to_design2(const Schedule& in) {
  Schedule s = in;
  const std::size_t T = in.l_pos.size();
  if (s.i_com.size() != T) {
    s.i_com.assign(T, 0.0);
    s.e_com.assign(T, 0.0);
    s.i_ret = in.l_pos;
    s.e_ret = in.l_neg;
  }
  return s;
}

Schedule to_design1(const Schedule& in) {
  Schedule s = in;
  s.i_com.clear();
  s.e_com.clear();
  s.i_ret.clear();
  s.e_ret.clear();
  return s;
}

std::vector<double> CommunityProfile::aggregate() const {
  if (schedules.empty()) return {};
  std::vector<double> L(schedules.front().l_pos.size(), 0.0);
  for (const Schedule& s : schedules) {
    for (std::size_t t = 0; t < L.size(); ++t) L[t] += s.l_pos[t] - s.l_neg[t];
  }
  return L;
}

CommunityProfile convert(const CommunityProfile& profile, Design design) {
  CommunityProfile out;
  out.design = design;
  for (const Schedule& s : profile.schedules) {
    out.schedules.push_back(design == Design::d2 ? to_design2(s) : to_design1(s));
  }
  return out;
}

int LinearConstraintBlock::add_row(std::string row_family, double lo, double hi) {
  lower.push_back(lo);
  upper.push_back(hi);
  family.push_back(std::move(row_family));
  return num_rows() - 1;
}

qp::SparseMatrix LinearConstraintBlock::matrix() const {
  qp::SparseMatrix A(num_rows(), num_vars);
  A.setFromTriplets(coefficients.begin(), coefficients.end());
  A.makeCompressed();
  return A;
}

LinearConstraintBlock individual_constraints(const MemberAssets& m, Design design, const Horizon& hz) {
  const VariableLayout L(m, design, hz);
  const int T = hz.steps;
  const double dt = hz.dt;
  LinearConstraintBlock b;
  b.num_vars = L.size();
  b.var_lower = qp::Vector::Zero(L.size());
  b.var_upper = qp::Vector::Constant(L.size(), qp::kInf);

  // Net-load identity: sum_a x + s dt - l_pos + l_neg = g - d.
  for (int t = 0; t < T; ++t) {
    const int r = b.add_row("net load", m.generation[t] - m.base_load[t], m.generation[t] - m.base_load[t]);
    for (int a = 0; a < L.num_appliances(); ++a) b.coefficients.emplace_back(r, L.x(a, t), 1.0);
    if (L.has_battery()) b.coefficients.emplace_back(r, L.s(t), dt);
    b.coefficients.emplace_back(r, L.l_pos(t), -1.0);
    b.coefficients.emplace_back(r, L.l_neg(t), 1.0);
  }
  // Peak: l_pos / dt <= p_bar <= conn_limit / dt. The lower side of p_bar is implied.
  for (int t = 0; t < T; ++t) {
    const int r = b.add_row("peak", -qp::kInf, 0.0);
    b.coefficients.emplace_back(r, L.l_pos(t), 1.0 / dt);
    b.coefficients.emplace_back(r, L.p_bar(), -1.0);
  }
  b.var_lower[L.p_bar()] = -qp::kInf;
  b.var_upper[L.p_bar()] = m.conn_limit / dt;

  // Appliances: window energy and per-slot power.
  for (int a = 0; a < L.num_appliances(); ++a) {
    const Appliance& app = m.appliances[a];
    const int r = b.add_row("appliance energy", app.energy, app.energy);
    for (int t = 0; t < T; ++t) {
      if (app.window[t] != 0) b.coefficients.emplace_back(r, L.x(a, t), 1.0);
      b.var_upper[L.x(a, t)] = app.power_max * app.window[t] * dt;
    }
  }

  // Battery: power limits, SOC recursion inside [0, capacity], return to e0.
  if (L.has_battery()) {
    const Battery& bat = *m.battery;
    for (int t = 0; t < T; ++t) {
      b.var_lower[L.s(t)] = -bat.discharge_max;
      b.var_upper[L.s(t)] = bat.charge_max;
      b.var_lower[L.soc(t)] = 0.0;
      b.var_upper[L.soc(t)] = bat.capacity;
      const int r = b.add_row("state of charge", t == 0 ? bat.soc_init : 0.0, t == 0 ? bat.soc_init : 0.0);
      b.coefficients.emplace_back(r, L.soc(t), 1.0);
      if (t > 0) b.coefficients.emplace_back(r, L.soc(t - 1), -1.0);
      b.coefficients.emplace_back(r, L.s(t), -dt);
    }
    b.var_lower[L.soc(T - 1)] = bat.soc_init;
    b.var_upper[L.soc(T - 1)] = bat.soc_init;
  }

  // Connection caps: import by conn_limit, export by instantaneous generation.
  for (int t = 0; t < T; ++t) {
    b.var_upper[L.l_pos(t)] = m.conn_limit;
    b.var_upper[L.l_neg(t)] = m.generation[t];
  }

  // D2 retail splits; e_ret, i_ret >= 0 carry e_com <= l_neg and i_com <= l_pos.
  if (design == Design::d2) {
    for (int t = 0; t < T; ++t) {
      int r = b.add_row("retail split", 0.0, 0.0);
      b.coefficients.emplace_back(r, L.i_ret(t), 1.0);
      b.coefficients.emplace_back(r, L.i_com(t), 1.0);
      b.coefficients.emplace_back(r, L.l_pos(t), -1.0);
      r = b.add_row("retail split", 0.0, 0.0);
      b.coefficients.emplace_back(r, L.e_ret(t), 1.0);
      b.coefficients.emplace_back(r, L.e_com(t), 1.0);
      b.coefficients.emplace_back(r, L.l_neg(t), -1.0);
    }
  }
  return b;
}

qp::Problem member_problem(const MemberAssets& member, Design design, const Horizon& horizon) {
  const LinearConstraintBlock b = individual_constraints(member, design, horizon);
  qp::Problem p = qp::make_problem(b.num_vars);
  p.A = b.matrix();
  p.row_lower = Eigen::Map<const qp::Vector>(b.lower.data(), b.num_rows());
  p.row_upper = Eigen::Map<const qp::Vector>(b.upper.data(), b.num_rows());
  p.var_lower = b.var_lower;
  p.var_upper = b.var_upper;
  return p;
}

std::vector<double> shared_constraint_residual(const CommunityProfile& profile) {
  if (profile.design != Design::d2) {
    throw std::invalid_argument("shared_constraint_residual: profile is not a design-2 profile");
  }
  if (profile.schedules.empty()) return {};
  std::vector<double> h(profile.schedules.front().l_pos.size(), 0.0);
  for (const Schedule& s : profile.schedules) {
    for (std::size_t t = 0; t < h.size(); ++t) h[t] += s.e_com[t] - s.i_com[t];
  }
  return h;
}

NetLoad net_load(const Schedule& s, const MemberAssets& m, int t, double dt) {
  NetLoad out;
  double v = m.base_load[t] - m.generation[t];
  for (const auto& x : s.x) v += x[t];
  if (!s.s.empty()) v += s.s[t] * dt;
  out.net = v;
  out.pos = std::max(0.0, v);
  out.neg = std::max(0.0, -v);
  return out;
}

const Violation* FeasibilityReport::find(const std::string& family) const {
  for (const Violation& v : worst) {
    if (v.family == family) return &v;
  }
  return nullptr;
}

FeasibilityReport check_feasibility(const CommunityProfile& profile, const Scenario& sc, double tol) {
  if (profile.num_members() != sc.num_members()) {
    throw std::invalid_argument("check_feasibility: profile and scenario member counts differ");
  }
  const int T = sc.steps();
  const double dt = sc.dt();
  std::map<std::string, Violation> worst;
  auto record = [&](const std::string& family, double amount, int i, int t) {
    if (!(amount > 0.0)) return;
    Violation& v = worst[family];
    if (v.family.empty() || amount > v.amount) v = Violation{family, amount, i, t};
  };
  auto below = [&](const std::string& family, double value, double bound, int i, int t) {
    record(family, bound - value, i, t);
  };
  auto above = [&](const std::string& family, double value, double bound, int i, int t) {
    record(family, value - bound, i, t);
  };

  for (int i = 0; i < sc.num_members(); ++i) {
    const MemberAssets& m = sc.members[i];
    const Schedule& s = profile.schedules[i];
    // Structural checks first; pack() validates lengths.
    pack(VariableLayout(m, profile.design, sc.horizon), s);

    for (int t = 0; t < T; ++t) {
      const NetLoad nl = net_load(s, m, t, dt);
      record("net load", std::abs(s.l_pos[t] - s.l_neg[t] - nl.net), i, t);
      below("nonnegativity", s.l_pos[t], 0.0, i, t);
      below("nonnegativity", s.l_neg[t], 0.0, i, t);
      above("peak", s.l_pos[t] / dt, s.p_bar, i, t);
      above("import cap", s.l_pos[t], m.conn_limit, i, t);
      above("export cap", s.l_neg[t], m.generation[t], i, t);
    }
    above("peak limit", s.p_bar, m.conn_limit / dt, i, -1);

    for (std::size_t a = 0; a < m.appliances.size(); ++a) {
      const Appliance& app = m.appliances[a];
      double energy = 0.0;
      for (int t = 0; t < T; ++t) {
        const double x = s.x[a][t];
        if (app.window[t] != 0) energy += x;
        below("appliance power", x, 0.0, i, t);
        above("appliance power", x, app.power_max * app.window[t] * dt, i, t);
      }
      record("appliance energy", std::abs(energy - app.energy), i, static_cast<int>(a));
    }

    if (m.battery) {
      const Battery& b = *m.battery;
      double soc = b.soc_init;
      for (int t = 0; t < T; ++t) {
        below("battery power", s.s[t], -b.discharge_max, i, t);
        above("battery power", s.s[t], b.charge_max, i, t);
        soc += s.s[t] * dt;
        below("state of charge", soc, 0.0, i, t);
        above("state of charge", soc, b.capacity, i, t);
        record("state of charge", std::abs(s.soc[t] - soc), i, t);
      }
      record("battery return", std::abs(soc - b.soc_init), i, T - 1);
    }

    if (profile.design == Design::d2) {
      for (int t = 0; t < T; ++t) {
        below("nonnegativity", s.i_com[t], 0.0, i, t);
        below("nonnegativity", s.e_com[t], 0.0, i, t);
        below("nonnegativity", s.i_ret[t], 0.0, i, t);
        below("nonnegativity", s.e_ret[t], 0.0, i, t);
        above("community export", s.e_com[t], s.l_neg[t], i, t);
        above("community import", s.i_com[t], s.l_pos[t], i, t);
        record("retail split", std::abs(s.i_ret[t] - (s.l_pos[t] - s.i_com[t])), i, t);
        record("retail split", std::abs(s.e_ret[t] - (s.l_neg[t] - s.e_com[t])), i, t);
      }
    }
  }
  if (profile.design == Design::d2) {
    const std::vector<double> h = shared_constraint_residual(profile);
    for (int t = 0; t < T; ++t) record("community balance", std::abs(h[t]), -1, t);
  }

  FeasibilityReport report;
  for (auto& [family, v] : worst) {
    report.max_violation = std::max(report.max_violation, v.amount);
    if (v.amount > tol) report.worst.push_back(v);
  }
  std::sort(report.worst.begin(), report.worst.end(),
            [](const Violation& a, const Violation& b) { return a.amount > b.amount; });
  report.feasible = report.worst.empty();
  return report;
}

}  // namespace rec
