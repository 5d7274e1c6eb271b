#include "rec/central.hpp"

#include <stdexcept>

namespace rec {

qp::Vector linear_cost(const MemberAssets& member, Design design, const Horizon& horizon,
                       const Tariffs& tf) {
  const VariableLayout L(member, design, horizon);
  qp::Vector c = qp::Vector::Zero(L.size());
  for (int t = 0; t < horizon.steps; ++t) {
    if (design == Design::d1) {
      c[L.l_pos(t)] = tf.import[t];
      c[L.l_neg(t)] = -tf.export_[t];
    } else {
      c[L.i_ret(t)] = tf.import[t];
      c[L.i_com(t)] = tf.import_local[t];
      c[L.e_ret(t)] = -tf.export_[t];
      c[L.e_com(t)] = -tf.export_local[t];
    }
  }
  c[L.p_bar()] = tf.beta;
  return c;
}

double member_linear_cost(const Schedule& s, const MemberAssets& member, Design design,
                          const Scenario& sc) {
  const Tariffs& tf = sc.tariffs;
  double v = tf.beta * s.p_bar;
  for (int t = 0; t < sc.steps(); ++t) {
    if (design == Design::d1) {
      v += tf.import[t] * s.l_pos[t] - tf.export_[t] * s.l_neg[t];
    } else {
      v += tf.import[t] * s.i_ret[t] + tf.import_local[t] * s.i_com[t] - tf.export_[t] * s.e_ret[t] -
           tf.export_local[t] * s.e_com[t];
    }
  }
  (void)member;
  return v;
}

CostBreakdown cost_breakdown(const CommunityProfile& profile, const Scenario& sc, Design design) {
  if (profile.design != design) throw std::invalid_argument("cost_breakdown: profile design mismatch");
  if (profile.num_members() != sc.num_members()) {
    throw std::invalid_argument("cost_breakdown: profile and scenario member counts differ");
  }
  const Tariffs& tf = sc.tariffs;
  CostBreakdown b;
  for (const Schedule& s : profile.schedules) {
    for (int t = 0; t < sc.steps(); ++t) {
      if (design == Design::d1) {
        b.retail_import += tf.import[t] * s.l_pos[t];
        b.retail_export += tf.export_[t] * s.l_neg[t];
      } else {
        b.retail_import += tf.import[t] * s.i_ret[t];
        b.retail_export += tf.export_[t] * s.e_ret[t];
        b.local_import += tf.import_local[t] * s.i_com[t];
        b.local_export += tf.export_local[t] * s.e_com[t];
      }
    }
    b.peak += tf.beta * s.p_bar;
  }
  for (double L : profile.aggregate()) b.upstream += tf.alpha * L * L;
  b.total = b.retail_import - b.retail_export + b.local_import - b.local_export + b.upstream + b.peak;
  return b;
}

double total_cost(const CommunityProfile& profile, const Scenario& sc, Design design) {
  return cost_breakdown(profile, sc, design).total;
}

namespace {

struct Stacked {
  qp::Problem problem;
  std::vector<VariableLayout> layouts;
  std::vector<int> offsets;
  int aggregate_offset = 0;          // L_t columns
  std::vector<int> balance_rows;     // D2 community balance rows
};

Stacked stack(const Scenario& sc, Design design, CentralObjective objective) {
  const int N = sc.num_members();
  const int T = sc.steps();
  const double alpha = sc.tariffs.alpha;
  Stacked st;
  int n = 0;
  for (const MemberAssets& m : sc.members) {
    st.layouts.emplace_back(m, design, sc.horizon);
    st.offsets.push_back(n);
    n += st.layouts.back().size();
  }
  st.aggregate_offset = n;
  n += T;

  std::vector<qp::Triplet> a;
  std::vector<double> lo, hi;
  qp::Vector vlo = qp::Vector::Constant(n, -qp::kInf);
  qp::Vector vhi = qp::Vector::Constant(n, qp::kInf);
  qp::Vector c = qp::Vector::Zero(n);
  std::vector<qp::Triplet> q;

  for (int i = 0; i < N; ++i) {
    const MemberAssets& m = sc.members[i];
    const int off = st.offsets[i];
    const int row0 = static_cast<int>(lo.size());
    const LinearConstraintBlock b = individual_constraints(m, design, sc.horizon);
    for (const qp::Triplet& tr : b.coefficients) a.emplace_back(row0 + tr.row(), off + tr.col(), tr.value());
    lo.insert(lo.end(), b.lower.begin(), b.lower.end());
    hi.insert(hi.end(), b.upper.begin(), b.upper.end());
    vlo.segment(off, b.num_vars) = b.var_lower;
    vhi.segment(off, b.num_vars) = b.var_upper;
    c.segment(off, b.num_vars) = linear_cost(m, design, sc.horizon, sc.tariffs);
    if (objective == CentralObjective::cp_potential && alpha > 0.0) {
      const VariableLayout& L = st.layouts[i];
      for (int t = 0; t < T; ++t) {
        const int p = off + L.l_pos(t), m2 = off + L.l_neg(t);
        q.emplace_back(p, p, alpha);
        q.emplace_back(m2, m2, alpha);
        q.emplace_back(p, m2, -alpha);
        q.emplace_back(m2, p, -alpha);
      }
    }
  }
  // L_t - sum_i (l_pos - l_neg) = 0
  for (int t = 0; t < T; ++t) {
    const int r = static_cast<int>(lo.size());
    lo.push_back(0.0);
    hi.push_back(0.0);
    a.emplace_back(r, st.aggregate_offset + t, 1.0);
    for (int i = 0; i < N; ++i) {
      a.emplace_back(r, st.offsets[i] + st.layouts[i].l_pos(t), -1.0);
      a.emplace_back(r, st.offsets[i] + st.layouts[i].l_neg(t), 1.0);
    }
    const double weight = objective == CentralObjective::social ? 2.0 * alpha : alpha;
    if (weight > 0.0) q.emplace_back(st.aggregate_offset + t, st.aggregate_offset + t, weight);
  }
  if (design == Design::d2) {
    for (int t = 0; t < T; ++t) {
      const int r = static_cast<int>(lo.size());
      lo.push_back(0.0);
      hi.push_back(0.0);
      for (int i = 0; i < N; ++i) {
        a.emplace_back(r, st.offsets[i] + st.layouts[i].e_com(t), 1.0);
        a.emplace_back(r, st.offsets[i] + st.layouts[i].i_com(t), -1.0);
      }
      st.balance_rows.push_back(r);
    }
  }

  qp::Problem& p = st.problem;
  p = qp::make_problem(n);
  p.Q.setFromTriplets(q.begin(), q.end());
  p.c = c;
  p.A.resize(static_cast<int>(lo.size()), n);
  p.A.setFromTriplets(a.begin(), a.end());
  p.A.makeCompressed();
  p.row_lower = Eigen::Map<const qp::Vector>(lo.data(), static_cast<int>(lo.size()));
  p.row_upper = Eigen::Map<const qp::Vector>(hi.data(), static_cast<int>(hi.size()));
  p.var_lower = vlo;
  p.var_upper = vhi;
  return st;
}

void require_optimal(const qp::Solution& s, const std::string& what) {
  if (!s.ok()) throw SolverFailure(what + ": solver returned " + qp::to_string(s.status), s.status);
}

}  // namespace

CentralSolution solve_centralized(const Scenario& sc, Design design, const CentralOptions& options) {
  const Stacked st = stack(sc, design, options.objective);
  CentralSolution out;
  out.qp = qp::solve_qp(st.problem, options.settings);
  require_optimal(out.qp, "centralized problem");
  out.profile.design = design;
  for (int i = 0; i < sc.num_members(); ++i) {
    const VariableLayout& L = st.layouts[i];
    out.profile.schedules.push_back(unpack(L, out.qp.z.segment(st.offsets[i], L.size())));
  }
  for (int r : st.balance_rows) out.balance_price.push_back(out.qp.row_duals[r]);
  out.cost = cost_breakdown(out.profile, sc, design);
  out.objective = out.qp.objective;
  return out;
}

BenchmarkSolution solve_individual_benchmark(const Scenario& sc, const qp::Settings& settings) {
  BenchmarkSolution out;
  out.profile.design = Design::d1;
  for (const MemberAssets& m : sc.members) {
    qp::Problem p = member_problem(m, Design::d1, sc.horizon);
    p.c = linear_cost(m, Design::d1, sc.horizon, sc.tariffs);
    const qp::Solution s = qp::solve_qp(p, settings);
    require_optimal(s, "benchmark problem of member " + m.id);
    const VariableLayout L(m, Design::d1, sc.horizon);
    out.profile.schedules.push_back(unpack(L, s.z));
    out.member_costs.push_back(member_linear_cost(out.profile.schedules.back(), m, Design::d1, sc));
  }
  for (double L : out.profile.aggregate()) out.upstream += sc.tariffs.alpha * L * L;
  out.total = out.upstream;
  for (double v : out.member_costs) out.total += v;
  return out;
}

double solve_leave_one_out(const Scenario& sc, Design design, int excluded, const CentralOptions& options) {
  if (sc.num_members() < 2) throw std::invalid_argument("solve_leave_one_out: needs at least two members");
  const Scenario reduced = without_member(sc, excluded);
  return solve_centralized(reduced, design, options).cost.total;
}

}  // namespace rec
