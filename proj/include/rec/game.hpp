#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rec/billing.hpp"
#include "rec/model.hpp"
#include "rec/qp.hpp"
#include "rec/scenario.hpp"

namespace rec {

/// Settings of the proximal decomposition algorithm.
struct GameConfig {
  Billing billing = Billing::cp;
  std::optional<double> tau;  // unset: tau_safety * theoretical bound
  double tau_safety = 1.05;
  double tau_floor = 1e-3;    // used when the bound is zero (single member)
  double rho = 1.0;           // averaging weight, in (0, 2)
  double tol_inner = 1e-6;
  double inner_shrink = 0.1;   // inner target = clamp(shrink * last outer residual, floor, tol_inner)
  double inner_floor = 1e-11;
  double tol_outer = 1e-5;
  double tol_balance = 1e-6;  // shared-constraint game only
  int max_outer = 5000;
  int max_inner = 1000;
  bool allow_small_tau = false;
  qp::Settings settings = qp::strongly_convex_settings();
};

struct IterationRecord {
  int outer = 0;
  int inner_sweeps = 0;
  double outer_residual = 0.0;
  double inner_residual = 0.0;
  double balance_residual = 0.0;
  double total_cost = 0.0;
};

struct EquilibriumReport {
  CommunityProfile profile;
  std::vector<double> pi;  // shared-constraint price, D2 only
  std::vector<double> bills;
  double total_cost = 0.0;
  DistributionKeys keys;
  double tau = 0.0;
  bool converged = false;
  int outer_iterations = 0;
  int inner_sweeps = 0;  // total over all outer iterations
  double outer_residual = 0.0;
  double inner_residual = 0.0;
  double balance_residual = 0.0;  // ||h||_inf, D2 only
  double price_residual = 0.0;    // ||pi+ - pi||_inf of the price update, D2 only
  std::optional<double> best_response_residual;
  std::optional<double> inefficiency;
  std::vector<IterationRecord> trace;
  std::vector<std::string> warnings;
};

/// Per-player quadratic objectives over the individual constraint sets.
class PlayerModel {
 public:
  PlayerModel(const Scenario& scenario, Design design, Billing billing, DistributionKeys keys);

  int num_players() const { return static_cast<int>(layouts_.size()); }
  Design design() const { return design_; }
  Billing billing() const { return billing_; }
  const DistributionKeys& keys() const { return keys_; }
  const VariableLayout& layout(int i) const { return layouts_[i]; }
  const Scenario& scenario() const { return scenario_; }

  /// Player i's bill as a function of its own decision vector, up to an
  /// additive constant, with rivals' aggregate net load `rivals_net`. A price
  /// adds pi' (e_com_i - i_com_i).
  qp::Problem problem(int i, const std::vector<double>& rivals_net, const std::vector<double>* price = nullptr) const;

  /// Adds rows |e_com_i[t] - i_com_i[t] - target[t]| <= slack.
  qp::Problem with_balance(const qp::Problem& problem, int i, const std::vector<double>& target,
                           double slack = 0.0) const;

  qp::Vector pack(int i, const Schedule& schedule) const { return rec::pack(layouts_[i], schedule); }
  Schedule unpack(int i, const qp::Vector& theta) const { return rec::unpack(layouts_[i], theta); }

 private:
  Scenario scenario_;
  Design design_;
  Billing billing_;
  DistributionKeys keys_;
  std::vector<VariableLayout> layouts_;
  std::vector<qp::Problem> base_;
  std::vector<qp::Vector> linear_;
};

/// Keys needed by `billing` (empty for CP).
DistributionKeys keys_for(const Scenario& scenario, Design design, Billing billing,
                          const CentralOptions& options = {});

/// Bill of player i when it plays `theta_i` and the others play `profile`.
double player_objective(const Scenario& scenario, const CommunityProfile& profile, int i, const Schedule& theta_i,
                        Billing billing, const DistributionKeys& keys);

/// Exact potential: the social cost for Net/VCG, the social cost minus
/// (alpha/2) sum_t sum_i l_i L_{-i} for CP. Uses the profile's design.
double game_potential(const CommunityProfile& profile, const Scenario& scenario, Billing billing);

/// Stacked partial gradients (grad_i b_i)_i in the players' column spaces.
std::vector<qp::Vector> game_gradient(const PlayerModel& model, const CommunityProfile& profile);

struct BestResponseAudit {
  double max_improvement = 0.0;
  std::vector<double> improvement;  // b_i(profile) - b_i(best response)
  double balance_residual = 0.0;    // ||h||_inf, D2 only
};

/// Unilateral best responses with rivals fixed. With `shared_balance`, each
/// best response keeps the community balance given the rivals' virtual flows.
BestResponseAudit best_response_audit(const PlayerModel& model, const CommunityProfile& profile, bool shared_balance,
                                      const qp::Settings& settings = {});

/// Proximal decomposition with Jacobi inner sweeps. With a D2 model a price
/// player enforces the community balance. `tau` must be resolved by the caller.
EquilibriumReport run_pda(const PlayerModel& model, const GameConfig& config, double tau,
                          const CommunityProfile& start, const std::vector<double>* pi_start = nullptr);

/// Default start: the individual benchmark, converted to `design`.
CommunityProfile benchmark_start(const Scenario& scenario, Design design);

}  // namespace rec
