#include "rec/gnep.hpp"

#include <cmath>
#include <stdexcept>

#include "rec/log.hpp"
#include "rec/nep.hpp"

namespace rec {

namespace {
constexpr double kPriceCoupling = 2.0;
}

double tau_bound_gnep(double alpha, int members, Billing billing, double max_key) {
  if (members < 1) throw std::invalid_argument("tau_bound_gnep: members must be >= 1");
  const double a = alpha * (members - 1);
  const double N = members;
  if (billing == Billing::cp) return a + std::sqrt(a * a + 4.0 * N);
  return 2.0 * a * max_key + 2.0 * std::sqrt(a * a * max_key * max_key + N);
}

double tau_bound_gnep(const Scenario& scenario, Billing billing, const DistributionKeys* keys) {
  double max_key = 0.0;
  if (billing != Billing::cp) {
    if (keys == nullptr) throw std::invalid_argument("tau_bound_gnep: keys required for proportional billing");
    max_key = keys->max();
  }
  return tau_bound_gnep(scenario.tariffs.alpha, scenario.num_members(), billing, max_key);
}

double extended_player_objective(const Scenario& scenario, const CommunityProfile& profile, int i,
                                 const Schedule& theta_i, const std::vector<double>& pi, Billing billing,
                                 const DistributionKeys& keys) {
  if (profile.design != Design::d2) throw std::invalid_argument("extended_player_objective: expects design d2");
  CommunityProfile p = profile;
  p.schedules.at(static_cast<std::size_t>(i)) = theta_i;
  const std::vector<double> h = shared_constraint_residual(p);
  double v = bills(p, scenario, Design::d2, billing, keys)[static_cast<std::size_t>(i)];
  for (std::size_t t = 0; t < h.size(); ++t) v += pi.at(t) * h[t];
  return v;
}

EquilibriumReport pda_shared_solve(const Scenario& scenario, const GameConfig& config, const DistributionKeys* keys,
                                   const CommunityProfile* start, const std::vector<double>* pi_start) {
  DistributionKeys k = keys != nullptr ? *keys : keys_for(scenario, Design::d2, config.billing);
  const PlayerModel model(scenario, Design::d2, config.billing, k);
  const double tau = resolve_tau(config, tau_bound_gnep(scenario, config.billing, &k));
  const CommunityProfile origin = start != nullptr ? *start : benchmark_start(scenario, Design::d2);
  std::string note;
  if (config.billing != Billing::cp) {
    note = "shared-constraint game with " + to_string(config.billing) +
           " billing: heuristic-convergence regime (no monotonicity guarantee)";
    warn(note);
  }
  EquilibriumReport rep = run_pda(model, config, tau, origin, pi_start);
  if (!note.empty()) rep.warnings.push_back(note);
  return rep;
}

BestResponseAudit check_gne(const CommunityProfile& profile, const Scenario& scenario, Billing billing,
                            const DistributionKeys& keys, const qp::Settings& settings) {
  if (profile.design != Design::d2) throw std::invalid_argument("check_gne: expects a design-2 profile");
  const PlayerModel model(scenario, Design::d2, billing, keys);
  return best_response_audit(model, profile, true, settings);
}

double potential_value_d2(const CommunityProfile& profile, const Scenario& scenario, Billing billing) {
  if (profile.design != Design::d2) throw std::invalid_argument("potential_value_d2: expects a design-2 profile");
  return game_potential(profile, scenario, billing);
}

Eigen::MatrixXd upsilon_matrix_gnep(int members, double alpha, Billing billing, double max_key, double tau) {
  Eigen::MatrixXd M(members + 1, members + 1);
  M.topLeftCorner(members, members) = upsilon_matrix_nep(members, alpha, billing, max_key, tau);
  M.col(members).setConstant(-kPriceCoupling);
  M.row(members).setConstant(-kPriceCoupling);
  M(members, members) = tau;
  return M;
}

}  // namespace rec
