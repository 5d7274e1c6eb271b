#pragma once

#include <Eigen/Dense>

#include "rec/game.hpp"

namespace rec {

/// Convergence bound of the D2 game with the price player.
/// CP: alpha (N-1) + sqrt(alpha^2 (N-1)^2 + 4N).
/// Net/VCG: 2 alpha (N-1) maxK + 2 sqrt(alpha^2 (N-1)^2 maxK^2 + N); no
/// monotonicity guarantee holds there, the value is a working choice.
double tau_bound_gnep(double alpha, int members, Billing billing, double max_key = 0.0);
double tau_bound_gnep(const Scenario& scenario, Billing billing, const DistributionKeys* keys = nullptr);

/// Bill of player i plus pi' h(profile with theta_i).
double extended_player_objective(const Scenario& scenario, const CommunityProfile& profile, int i,
                                 const Schedule& theta_i, const std::vector<double>& pi, Billing billing,
                                 const DistributionKeys& keys);

/// D2 game with shared community balance. Start defaults to the individual
/// benchmark (zero virtual flows) and a zero price.
EquilibriumReport pda_shared_solve(const Scenario& scenario, const GameConfig& config,
                                   const DistributionKeys* keys = nullptr, const CommunityProfile* start = nullptr,
                                   const std::vector<double>* pi_start = nullptr);

/// Best responses keep the community balance given the rivals' virtual flows.
BestResponseAudit check_gne(const CommunityProfile& profile, const Scenario& scenario, Billing billing,
                            const DistributionKeys& keys, const qp::Settings& settings = {});

/// Potential of the D2 game (design checked).
double potential_value_d2(const CommunityProfile& profile, const Scenario& scenario, Billing billing);

/// (N+1) x (N+1) Z-matrix of the extended game: the member block of the D1
/// game and a member-price coupling of 2.
Eigen::MatrixXd upsilon_matrix_gnep(int members, double alpha, Billing billing, double max_key, double tau);

}  // namespace rec
