#include "rec/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rec {

namespace {

double inf_norm(const qp::Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> balance(const CommunityProfile& profile) {
  return profile.design == Design::d2 ? shared_constraint_residual(profile) : std::vector<double>{};
}

}  // namespace

PlayerModel::PlayerModel(const Scenario& scenario, Design design, Billing billing, DistributionKeys keys)
    : scenario_(scenario), design_(design), billing_(billing), keys_(std::move(keys)) {
  if (billing_ != Billing::cp && static_cast<int>(keys_.K.size()) != scenario_.num_members()) {
    throw std::invalid_argument("PlayerModel: proportional billing needs one key per member");
  }
  for (const MemberAssets& m : scenario_.members) {
    layouts_.emplace_back(m, design_, scenario_.horizon);
    base_.push_back(member_problem(m, design_, scenario_.horizon));
    linear_.push_back(linear_cost(m, design_, scenario_.horizon, scenario_.tariffs));
  }
}

qp::Problem PlayerModel::problem(int i, const std::vector<double>& rivals_net, const std::vector<double>* price) const {
  const VariableLayout& L = layouts_[i];
  const int T = scenario_.steps();
  const double alpha = scenario_.tariffs.alpha;
  const double weight = billing_ == Billing::cp ? 1.0 : keys_.K[i];
  // CP:      c'theta + alpha l_i^2 + alpha l_i L_{-i}
  // Net/VCG: K_i (c'theta + alpha l_i^2 + 2 alpha l_i L_{-i}) + const
  const double cross = billing_ == Billing::cp ? alpha : 2.0 * alpha * weight;
  const double curvature = 2.0 * alpha * weight;

  qp::Problem p = base_[i];
  p.c = weight * linear_[i];
  std::vector<qp::Triplet> q;
  for (int t = 0; t < T; ++t) {
    const int a = L.l_pos(t), b = L.l_neg(t);
    p.c[a] += cross * rivals_net[t];
    p.c[b] -= cross * rivals_net[t];
    if (curvature > 0.0) {
      q.emplace_back(a, a, curvature);
      q.emplace_back(b, b, curvature);
      q.emplace_back(a, b, -curvature);
      q.emplace_back(b, a, -curvature);
    }
    if (price != nullptr) {
      if (design_ != Design::d2) throw std::invalid_argument("PlayerModel: price term needs design d2");
      p.c[L.e_com(t)] += (*price)[t];
      p.c[L.i_com(t)] -= (*price)[t];
    }
  }
  p.Q.setFromTriplets(q.begin(), q.end());
  return p;
}

qp::Problem PlayerModel::with_balance(const qp::Problem& problem, int i, const std::vector<double>& target,
                                      double slack) const {
  const VariableLayout& L = layouts_[i];
  const int T = scenario_.steps();
  const int m = problem.num_rows();
  qp::Problem p = problem;
  std::vector<qp::Triplet> trips;
  for (int j = 0; j < problem.A.outerSize(); ++j) {
    for (qp::SparseMatrix::InnerIterator it(problem.A, j); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
  }
  p.row_lower.conservativeResize(m + T);
  p.row_upper.conservativeResize(m + T);
  for (int t = 0; t < T; ++t) {
    trips.emplace_back(m + t, L.e_com(t), 1.0);
    trips.emplace_back(m + t, L.i_com(t), -1.0);
    p.row_lower[m + t] = target[t] - slack;
    p.row_upper[m + t] = target[t] + slack;
  }
  p.A.resize(m + T, problem.num_vars());
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.A.makeCompressed();
  return p;
}

DistributionKeys keys_for(const Scenario& scenario, Design design, Billing billing, const CentralOptions& options) {
  switch (billing) {
    case Billing::net: return keys_net(scenario);
    case Billing::vcg: return keys_vcg(scenario, design, options);
    case Billing::cp: break;
  }
  return {};
}

double player_objective(const Scenario& scenario, const CommunityProfile& profile, int i, const Schedule& theta_i,
                        Billing billing, const DistributionKeys& keys) {
  CommunityProfile p = profile;
  p.schedules.at(static_cast<std::size_t>(i)) = theta_i;
  return bills(p, scenario, p.design, billing, keys)[static_cast<std::size_t>(i)];
}

double game_potential(const CommunityProfile& profile, const Scenario& scenario, Billing billing) {
  const double f = total_cost(profile, scenario, profile.design);
  if (billing != Billing::cp) return f;
  const std::vector<double> L = profile.aggregate();
  double cross = 0.0;
  for (const Schedule& s : profile.schedules) {
    for (int t = 0; t < scenario.steps(); ++t) cross += s.net(t) * (L[t] - s.net(t));
  }
  return f - 0.5 * scenario.tariffs.alpha * cross;
}

std::vector<qp::Vector> game_gradient(const PlayerModel& model, const CommunityProfile& profile) {
  const Scenario& sc = model.scenario();
  const double alpha = sc.tariffs.alpha;
  const std::vector<double> L = profile.aggregate();
  std::vector<qp::Vector> out;
  for (int i = 0; i < model.num_players(); ++i) {
    const VariableLayout& lay = model.layout(i);
    const Schedule& s = profile.schedules[i];
    qp::Vector g = linear_cost(sc.members[i], model.design(), sc.horizon, sc.tariffs);
    double w = 1.0;
    if (model.billing() != Billing::cp) w = model.keys().K[i];
    for (int t = 0; t < sc.steps(); ++t) {
      const double d = model.billing() == Billing::cp ? alpha * (L[t] + s.net(t)) : 2.0 * alpha * L[t];
      g[lay.l_pos(t)] += d;
      g[lay.l_neg(t)] -= d;
    }
    out.push_back(w * g);
  }
  return out;
}

BestResponseAudit best_response_audit(const PlayerModel& model, const CommunityProfile& profile, bool shared_balance,
                                      const qp::Settings& settings) {
  if (profile.design != model.design()) throw std::invalid_argument("best_response_audit: design mismatch");
  const int T = model.scenario().steps();
  const std::vector<double> L = profile.aggregate();
  const std::vector<double> h = balance(profile);
  BestResponseAudit audit;
  audit.balance_residual = inf_norm(h);
  audit.max_improvement = -qp::kInf;
  for (int i = 0; i < model.num_players(); ++i) {
    const Schedule& s = profile.schedules[i];
    std::vector<double> rivals(T);
    for (int t = 0; t < T; ++t) rivals[t] = L[t] - s.net(t);
    qp::Problem p = model.problem(i, rivals);
    if (shared_balance) {
      std::vector<double> target(T);
      // Rivals' virtual flows fixed: i's net pool flow stays at -(rivals' sum), which is its current value up
      // to h. The current value keeps the audited strategy feasible when h is only approximately zero.
      for (int t = 0; t < T; ++t) target[t] = s.e_com[t] - s.i_com[t];
      p = model.with_balance(p, i, target);
    }
    const qp::Solution br = qp::solve_qp(p, settings);
    if (!br.ok()) {
      throw SolverFailure("best response of member " + model.scenario().members[i].id + ": " + qp::to_string(br.status),
                          br.status);
    }
    const double gain = p.objective(model.pack(i, s)) - br.objective;
    audit.improvement.push_back(gain);
    audit.max_improvement = std::max(audit.max_improvement, gain);
  }
  if (model.num_players() == 0) audit.max_improvement = 0.0;
  return audit;
}

CommunityProfile benchmark_start(const Scenario& scenario, Design design) {
  return convert(solve_individual_benchmark(scenario).profile, design);
}

EquilibriumReport run_pda(const PlayerModel& model, const GameConfig& config, double tau, const CommunityProfile& start,
                          const std::vector<double>* pi_start) {
  if (!(tau > 0.0)) throw std::invalid_argument("run_pda: tau must be > 0");
  if (!(config.rho > 0.0 && config.rho < 2.0)) throw std::invalid_argument("run_pda: rho must lie in (0, 2)");
  const Scenario& sc = model.scenario();
  const int N = model.num_players();
  const int T = sc.steps();
  const bool shared = model.design() == Design::d2;
  if (start.num_members() != N) throw std::invalid_argument("run_pda: start profile has the wrong size");
  const CommunityProfile start_profile = convert(start, model.design());

  std::vector<qp::Vector> center(N), Y(N);
  for (int i = 0; i < N; ++i) {
    center[i] = model.pack(i, start_profile.schedules[i]);
    Y[i] = center[i];
  }
  std::vector<double> pi_center(shared ? T : 0, 0.0);
  if (shared && pi_start != nullptr) {
    if (static_cast<int>(pi_start->size()) != T) throw std::invalid_argument("run_pda: price start has the wrong length");
    pi_center = *pi_start;
  }
  std::vector<double> price = pi_center;
  std::vector<qp::WarmStart> warm(N);

  auto profile_of = [&](const std::vector<qp::Vector>& theta) {
    CommunityProfile p;
    p.design = model.design();
    for (int i = 0; i < N; ++i) p.schedules.push_back(model.unpack(i, theta[i]));
    return p;
  };

  EquilibriumReport rep;
  rep.tau = tau;
  rep.keys = model.keys();
  CommunityProfile current = profile_of(Y);

  // Inner accuracy follows the outer progress so that the errors stay summable.
  double inner_target = config.tol_inner;
  for (int k = 1; k <= config.max_outer; ++k) {
    int sweeps = 0;
    double inner = qp::kInf;
    while (sweeps < config.max_inner) {
      ++sweeps;
      const std::vector<double> L = current.aggregate();
      std::vector<qp::Vector> next(N);
      inner = 0.0;
      for (int i = 0; i < N; ++i) {
        std::vector<double> rivals(T);
        for (int t = 0; t < T; ++t) rivals[t] = L[t] - current.schedules[i].net(t);
        const qp::Problem p = model.problem(i, rivals, shared ? &price : nullptr);
        const qp::Solution s =
            qp::solve_strongly_convex(p, tau, center[i], config.settings, warm[i].z.size() ? &warm[i] : nullptr);
        if (!s.ok()) {
          throw SolverFailure("proximal subproblem of member " + sc.members[i].id + ": " + qp::to_string(s.status),
                              s.status);
        }
        warm[i] = qp::WarmStart{s.z, s.row_duals, s.bound_duals};
        inner = std::max(inner, inf_norm(qp::Vector(s.z - Y[i])));
        next[i] = s.z;
      }
      if (shared) {
        const std::vector<double> h = shared_constraint_residual(current);
        for (int t = 0; t < T; ++t) {
          const double p_new = pi_center[t] + h[t] / tau;
          inner = std::max(inner, std::abs(p_new - price[t]));
          price[t] = p_new;
        }
      }
      Y = std::move(next);
      current = profile_of(Y);
      rep.inner_sweeps += 1;
      if (inner <= inner_target) break;
    }

    double outer = 0.0;
    for (int i = 0; i < N; ++i) {
      const qp::Vector updated = (1.0 - config.rho) * center[i] + config.rho * Y[i];
      outer = std::max(outer, inf_norm(qp::Vector(updated - center[i])));
      center[i] = updated;
    }
    for (int t = 0; t < static_cast<int>(pi_center.size()); ++t) {
      const double updated = (1.0 - config.rho) * pi_center[t] + config.rho * price[t];
      outer = std::max(outer, std::abs(updated - pi_center[t]));
      pi_center[t] = updated;
    }

    IterationRecord rec;
    rec.outer = k;
    rec.inner_sweeps = sweeps;
    rec.outer_residual = outer;
    rec.inner_residual = inner;
    rec.balance_residual = shared ? inf_norm(shared_constraint_residual(current)) : 0.0;
    rec.total_cost = total_cost(current, sc, model.design());
    rep.trace.push_back(rec);
    rep.outer_iterations = k;
    rep.outer_residual = outer;
    rep.inner_residual = inner;
    rep.balance_residual = rec.balance_residual;
    inner_target = std::clamp(config.inner_shrink * outer, config.inner_floor, config.tol_inner);

    if (inner <= config.tol_inner && outer <= config.tol_outer &&
        (!shared || rec.balance_residual <= config.tol_balance)) {
      rep.converged = true;
      break;
    }
  }

  rep.profile = current;
  if (shared) {
    rep.pi = price;
    const std::vector<double> h = shared_constraint_residual(current);
    double pr = 0.0;
    for (int t = 0; t < T; ++t) pr = std::max(pr, std::abs(h[t] / tau));
    rep.price_residual = pr;
  }
  rep.total_cost = total_cost(current, sc, model.design());
  rep.bills = bills(current, sc, model.design(), model.billing(), model.keys());
  return rep;
}

}  // namespace rec
