#pragma once

#include <string>
#include <vector>

#include "rec/central.hpp"
#include "rec/model.hpp"
#include "rec/scenario.hpp"

namespace rec {

/// [Net]: proportional keys from minimal absolute net load.
/// [VCG]: proportional keys from absolute marginal contributions to the optimal cost.
/// [CP]:  per-slot allocation of commodity, upstream and peak costs.
enum class Billing { net, vcg, cp };

std::string to_string(Billing billing);
Billing parse_billing(const std::string& text);

struct DistributionKeys {
  std::vector<double> K;
  bool fallback = false;  // degenerate denominator, uniform keys used
  std::vector<double> raw;  // numerators before normalization

  double max() const;
  double sum() const;
};

/// Keys proportional to each member's smallest achievable daily sum of |l|.
/// The design does not matter: virtual flows leave physical net load unchanged.
DistributionKeys keys_net(const Scenario& scenario, const qp::Settings& settings = {});

/// Keys proportional to |C*(all) - C*(all without i)|. `full_cost` skips the
/// full-community solve when already known.
DistributionKeys keys_vcg(const Scenario& scenario, Design design, const CentralOptions& options = {},
                          const double* full_cost = nullptr);

/// Normalizes nonnegative contributions; uniform keys when they sum to zero.
DistributionKeys normalize_keys(std::vector<double> raw);

std::vector<double> bill_proportional(const DistributionKeys& keys, double total_cost);

/// Per-slot allocation. Sums to the total cost.
std::vector<double> bill_cp(const CommunityProfile& profile, const Scenario& scenario, Design design);

/// Bills of every member under `billing`; keys are ignored for CP.
std::vector<double> bills(const CommunityProfile& profile, const Scenario& scenario, Design design,
                          Billing billing, const DistributionKeys& keys);

}  // namespace rec
