#include "rec/nep.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace rec {

double tau_bound_nep(double alpha, int members, Billing billing, double max_key) {
  if (members < 1) throw std::invalid_argument("tau_bound_nep: members must be >= 1");
  const double n1 = members - 1;
  return billing == Billing::cp ? 2.0 * alpha * n1 : 4.0 * alpha * n1 * max_key;
}

double tau_bound_nep(const Scenario& scenario, Billing billing, const DistributionKeys* keys) {
  double max_key = 0.0;
  if (billing != Billing::cp) {
    if (keys == nullptr) throw std::invalid_argument("tau_bound_nep: keys required for proportional billing");
    max_key = keys->max();
  }
  return tau_bound_nep(scenario.tariffs.alpha, scenario.num_members(), billing, max_key);
}

double resolve_tau(const GameConfig& config, double bound) {
  if (!config.tau) return std::max(config.tau_safety * bound, config.tau_floor);
  const double tau = *config.tau;
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!config.allow_small_tau && !(tau > bound)) {
    std::ostringstream msg;
    msg << "tau " << tau << " does not exceed the convergence bound " << bound;
    throw std::invalid_argument(msg.str());
  }
  return tau;
}

EquilibriumReport pda_solve(const Scenario& scenario, const GameConfig& config, const DistributionKeys* keys,
                            const CommunityProfile* start) {
  DistributionKeys k = keys != nullptr ? *keys : keys_for(scenario, Design::d1, config.billing);
  const PlayerModel model(scenario, Design::d1, config.billing, k);
  const double tau = resolve_tau(config, tau_bound_nep(scenario, config.billing, &k));
  const CommunityProfile origin = start != nullptr ? *start : benchmark_start(scenario, Design::d1);
  return run_pda(model, config, tau, origin);
}

BestResponseAudit check_nash(const CommunityProfile& profile, const Scenario& scenario, Billing billing,
                             const DistributionKeys& keys, const qp::Settings& settings) {
  if (profile.design != Design::d1) throw std::invalid_argument("check_nash: expects a design-1 profile");
  const PlayerModel model(scenario, Design::d1, billing, keys);
  return best_response_audit(model, profile, false, settings);
}

double potential_value(const CommunityProfile& profile, const Scenario& scenario, Billing billing) {
  if (profile.design != Design::d1) throw std::invalid_argument("potential_value: expects a design-1 profile");
  return game_potential(profile, scenario, billing);
}

Eigen::MatrixXd upsilon_matrix_nep(int members, double alpha, Billing billing, double max_key, double tau) {
  const double upsilon = billing == Billing::cp ? 2.0 * alpha : 4.0 * alpha * max_key;
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(members, members, -upsilon);
  M.diagonal().setConstant(tau);
  return M;
}

bool leading_minors_positive(const Eigen::MatrixXd& M) {
  for (int k = 1; k <= M.rows(); ++k) {
    if (!(M.topLeftCorner(k, k).determinant() > 0.0)) return false;
  }
  return true;
}

Eigen::MatrixXd coupling_matrix_d(int members) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * members, 2 * members);
  for (int i = 0; i < members; ++i) {
    D.block<2, 2>(2 * i, 2 * i) << 1.0, -1.0, -1.0, 1.0;
  }
  return D;
}

Eigen::MatrixXd coupling_matrix_e(int members) {
  const int n = 2 * members;
  Eigen::MatrixXd E(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) E(a, b) = (a + b) % 2 == 0 ? 1.0 : -1.0;
  }
  return E;
}

}  // namespace rec
