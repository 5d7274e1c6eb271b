#pragma once

#include <string>
#include <vector>

#include <random>
#include <stdexcept>

#include "rec/model.hpp"
#include "rec/scenario.hpp"

namespace rec::testing {

inline MemberAssets flat_member(const std::string& id, std::vector<double> base_load, std::vector<double> generation = {}) {
  MemberAssets m;
  m.id = id;
  m.base_load = std::move(base_load);
  m.generation = generation.empty() ? std::vector<double>(m.base_load.size(), 0.0) : std::move(generation);
  m.conn_limit = 20.0;
  return m;
}

inline Appliance flexible(const std::string& name, std::vector<int> window, double energy, double power_max) {
  return Appliance{name, std::move(window), energy, power_max};
}

inline Scenario community(std::vector<MemberAssets> members, double alpha = 0.00109488, double beta = 0.1096737) {
  Scenario s;
  s.horizon = Horizon{static_cast<int>(members.front().base_load.size()), 1.0};
  s.tariffs = default_tariffs(s.horizon);
  s.tariffs.alpha = alpha;
  s.tariffs.beta = beta;
  s.members = std::move(members);
  return s;
}

inline Scenario synthetic(std::uint64_t seed, int members, PvLevel pv = PvLevel::high, int steps = 24) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.members = members;
  spec.horizon = Horizon{steps, 24.0 / steps};
  spec.pv_level = pv;
  return generate_synthetic(spec);
}

/// Feasible schedule of member i: minimizer of a random linear cost plus a
/// small quadratic term over the member's own constraint set.
inline Schedule random_schedule(const Scenario& sc, int i, Design design, std::mt19937_64& rng) {
  const MemberAssets& m = sc.members[i];
  qp::Problem p = member_problem(m, design, sc.horizon);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int j = 0; j < p.num_vars(); ++j) p.c[j] = u(rng);
  std::vector<Eigen::Triplet<double>> diag;
  for (int j = 0; j < p.num_vars(); ++j) diag.emplace_back(j, j, 0.05);
  p.Q.resize(p.num_vars(), p.num_vars());
  p.Q.setFromTriplets(diag.begin(), diag.end());
  const qp::Solution s = qp::solve_qp(p);
  if (!s.ok()) throw std::runtime_error("random_schedule: solve failed");
  return unpack(VariableLayout(m, design, sc.horizon), s.z);
}

inline CommunityProfile random_profile(const Scenario& sc, Design design, std::mt19937_64& rng) {
  CommunityProfile p;
  p.design = design;
  for (int i = 0; i < sc.num_members(); ++i) p.schedules.push_back(random_schedule(sc, i, design, rng));
  return p;
}

}  // namespace rec::testing
