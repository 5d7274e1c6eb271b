#pragma once

#include <Eigen/Dense>

#include "rec/game.hpp"

namespace rec {

/// Smallest proximal weight with guaranteed convergence for the D1 game:
/// 2 alpha (N-1) for CP, 4 alpha (N-1) max K for Net/VCG. Zero for N = 1.
double tau_bound_nep(double alpha, int members, Billing billing, double max_key = 0.0);
double tau_bound_nep(const Scenario& scenario, Billing billing, const DistributionKeys* keys = nullptr);

/// tau from the config, or safety * bound (at least the floor). Throws when an
/// explicit tau is not above the bound unless allow_small_tau is set.
double resolve_tau(const GameConfig& config, double bound);

/// D1 game. `keys` are computed when null and the billing needs them; the
/// start defaults to the individual benchmark.
EquilibriumReport pda_solve(const Scenario& scenario, const GameConfig& config, const DistributionKeys* keys = nullptr,
                            const CommunityProfile* start = nullptr);

/// Largest unilateral gain b_i(profile) - b_i(best response).
BestResponseAudit check_nash(const CommunityProfile& profile, const Scenario& scenario, Billing billing,
                             const DistributionKeys& keys, const qp::Settings& settings = {});

/// Potential of the D1 game (design checked).
double potential_value(const CommunityProfile& profile, const Scenario& scenario, Billing billing);

/// Z-matrix tau I - upsilon (J - I) of the D1 game with upsilon = 2 alpha (CP)
/// or 4 alpha max K (Net/VCG).
Eigen::MatrixXd upsilon_matrix_nep(int members, double alpha, Billing billing, double max_key, double tau);

/// All leading principal minors strictly positive.
bool leading_minors_positive(const Eigen::MatrixXd& M);

/// Block-diagonal [[1,-1],[-1,1]] per member, size 2N.
Eigen::MatrixXd coupling_matrix_d(int members);
/// Rank-one (-1)^(a+b) pattern over (l_pos, l_neg) pairs of all members, size 2N.
Eigen::MatrixXd coupling_matrix_e(int members);

}  // namespace rec
