#include "rec/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rec {

namespace {

void check_shape(const CommunityProfile& profile, const Scenario& scenario) {
  if (profile.num_members() != scenario.num_members()) {
    throw std::invalid_argument("profile and scenario disagree on the number of members");
  }
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::optional<double> ratio_complement(double numerator, double denominator) {
  if (!(denominator > 0.0)) return std::nullopt;
  return 1.0 - numerator / denominator;
}

}  // namespace

std::optional<double> compute_scr(const CommunityProfile& profile, const Scenario& scenario) {
  check_shape(profile, scenario);
  double exported = 0.0;
  double generated = 0.0;
  for (int i = 0; i < profile.num_members(); ++i) {
    const Schedule& s = profile.schedules[i];
    exported += sum(profile.design == Design::d1 ? s.l_neg : s.e_ret);
    generated += sum(scenario.members[i].generation);
  }
  return ratio_complement(exported, generated);
}

std::optional<double> compute_ssr(const CommunityProfile& profile, const Scenario& scenario) {
  check_shape(profile, scenario);
  double imported = 0.0;
  double consumed = 0.0;
  for (int i = 0; i < profile.num_members(); ++i) {
    const Schedule& s = profile.schedules[i];
    imported += sum(profile.design == Design::d1 ? s.l_pos : s.i_ret);
    consumed += sum(s.l_pos) - sum(s.l_neg) + sum(scenario.members[i].generation);
  }
  return ratio_complement(imported, consumed);
}

std::optional<double> compute_par(const std::vector<double>& aggregate) {
  if (aggregate.empty()) return std::nullopt;
  const double total = sum(aggregate);
  if (!(total > 0.0)) return std::nullopt;
  const double peak = *std::max_element(aggregate.begin(), aggregate.end());
  return static_cast<double>(aggregate.size()) * peak / total;
}

std::optional<double> compute_par(const CommunityProfile& profile, Sign sign) {
  if (profile.schedules.empty()) return std::nullopt;
  std::vector<double> agg(profile.schedules.front().l_pos.size(), 0.0);
  for (const Schedule& s : profile.schedules) {
    const std::vector<double>& part = sign == Sign::plus ? s.l_pos : s.l_neg;
    for (std::size_t t = 0; t < agg.size(); ++t) agg[t] += part[t];
  }
  return compute_par(agg);
}

std::optional<double> compute_inefficiency(const std::vector<double>& bills, double social_optimum) {
  if (social_optimum == 0.0) return std::nullopt;
  return (sum(bills) - social_optimum) / social_optimum;
}

KpiReport compute_kpis(const CommunityProfile& profile, const Scenario& scenario, const std::vector<double>& bills,
                       double total_cost, std::optional<double> social_optimum) {
  KpiReport r;
  r.scr = compute_scr(profile, scenario);
  r.ssr = compute_ssr(profile, scenario);
  r.par_plus = compute_par(profile, Sign::plus);
  r.par_minus = compute_par(profile, Sign::minus);
  r.total_cost = total_cost;
  r.bills = bills;
  if (social_optimum) r.inefficiency = compute_inefficiency(bills, *social_optimum);
  return r;
}

}  // namespace rec
