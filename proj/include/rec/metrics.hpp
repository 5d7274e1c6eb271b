#pragma once

#include <optional>
#include <vector>

#include "rec/model.hpp"
#include "rec/scenario.hpp"

namespace rec {

enum class Sign { plus, minus };

/// Share of community generation consumed locally: 1 - sum(kappa) / sum(g),
/// kappa = l_neg (D1) or e_ret (D2). Empty when there is no generation.
std::optional<double> compute_scr(const CommunityProfile& profile, const Scenario& scenario);

/// Share of community consumption supplied locally: 1 - sum(kappa) / sum(l + g),
/// kappa = l_pos (D1) or i_ret (D2), l the signed net load.
std::optional<double> compute_ssr(const CommunityProfile& profile, const Scenario& scenario);

/// Peak-to-average ratio of sum_i l_pos (plus) or sum_i l_neg (minus).
std::optional<double> compute_par(const CommunityProfile& profile, Sign sign);
std::optional<double> compute_par(const std::vector<double>& aggregate);

/// (sum(bills) - optimum) / optimum. Empty for a zero optimum.
std::optional<double> compute_inefficiency(const std::vector<double>& bills, double social_optimum);

struct KpiReport {
  std::optional<double> scr;
  std::optional<double> ssr;
  std::optional<double> par_plus;
  std::optional<double> par_minus;
  double total_cost = 0.0;
  std::vector<double> bills;
  std::optional<double> inefficiency;
};

KpiReport compute_kpis(const CommunityProfile& profile, const Scenario& scenario, const std::vector<double>& bills,
                       double total_cost, std::optional<double> social_optimum = std::nullopt);

}  // namespace rec
