#include "rec/billing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rec/log.hpp"

namespace rec {

std::string to_string(Billing billing) {
  switch (billing) {
    case Billing::net: return "net";
    case Billing::vcg: return "vcg";
    case Billing::cp: return "cp";
  }
  return "?";
}

Billing parse_billing(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "net") return Billing::net;
  if (t == "vcg") return Billing::vcg;
  if (t == "cp") return Billing::cp;
  throw std::invalid_argument("unknown billing '" + text + "' (expected net, vcg or cp)");
}

double DistributionKeys::max() const { return K.empty() ? 0.0 : *std::max_element(K.begin(), K.end()); }

double DistributionKeys::sum() const { return std::accumulate(K.begin(), K.end(), 0.0); }

DistributionKeys normalize_keys(std::vector<double> raw) {
  DistributionKeys keys;
  const std::size_t N = raw.size();
  double total = 0.0;
  for (double& v : raw) {
    if (v < 0.0) throw std::invalid_argument("normalize_keys: negative contribution");
    total += v;
  }
  keys.raw = raw;
  if (N == 0) return keys;
  if (!(total > 0.0)) {
    warn("distribution keys: all contributions are zero, using uniform keys");
    keys.fallback = true;
    keys.K.assign(N, 1.0 / static_cast<double>(N));
    return keys;
  }
  keys.K.resize(N);
  for (std::size_t i = 0; i < N; ++i) keys.K[i] = raw[i] / total;
  return keys;
}

DistributionKeys keys_net(const Scenario& sc, const qp::Settings& settings) {
  std::vector<double> raw;
  for (const MemberAssets& m : sc.members) {
    const VariableLayout L(m, Design::d1, sc.horizon);
    qp::Problem p = member_problem(m, Design::d1, sc.horizon);
    for (int t = 0; t < sc.steps(); ++t) {
      p.c[L.l_pos(t)] = 1.0;
      p.c[L.l_neg(t)] = 1.0;
    }
    const qp::Solution s = qp::solve_qp(p, settings);
    if (!s.ok()) throw SolverFailure("net-load key problem of member " + m.id + ": " + qp::to_string(s.status), s.status);
    // Clip solver noise around an exact zero.
    raw.push_back(std::max(0.0, s.objective));
  }
  return normalize_keys(std::move(raw));
}

DistributionKeys keys_vcg(const Scenario& sc, Design design, const CentralOptions& options, const double* full_cost) {
  if (sc.num_members() < 2) throw std::invalid_argument("keys_vcg: needs at least two members");
  const double C = full_cost != nullptr ? *full_cost : solve_centralized(sc, design, options).cost.total;
  std::vector<double> raw;
  for (int i = 0; i < sc.num_members(); ++i) {
    raw.push_back(std::abs(C - solve_leave_one_out(sc, design, i, options)));
  }
  return normalize_keys(std::move(raw));
}

std::vector<double> bill_proportional(const DistributionKeys& keys, double total) {
  std::vector<double> out;
  out.reserve(keys.K.size());
  for (double k : keys.K) out.push_back(k * total);
  return out;
}

std::vector<double> bill_cp(const CommunityProfile& profile, const Scenario& sc, Design design) {
  if (profile.design != design) throw std::invalid_argument("bill_cp: profile design mismatch");
  const std::vector<double> L = profile.aggregate();
  const double alpha = sc.tariffs.alpha;
  std::vector<double> out;
  for (int i = 0; i < profile.num_members(); ++i) {
    const Schedule& s = profile.schedules[i];
    double b = member_linear_cost(s, sc.members[i], design, sc);
    for (int t = 0; t < sc.steps(); ++t) b += s.net(t) * alpha * L[t];
    out.push_back(b);
  }
  return out;
}

std::vector<double> bills(const CommunityProfile& profile, const Scenario& sc, Design design, Billing billing,
                          const DistributionKeys& keys) {
  if (billing == Billing::cp) return bill_cp(profile, sc, design);
  if (static_cast<int>(keys.K.size()) != profile.num_members()) {
    throw std::invalid_argument("bills: key count does not match the profile");
  }
  return bill_proportional(keys, total_cost(profile, sc, design));
}

}  // namespace rec
