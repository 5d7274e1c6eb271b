#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "rec/nep.hpp"

using namespace rec;
using namespace rec::testing;

namespace {

constexpr double kAlpha = 0.00109488;

double dot(const std::vector<qp::Vector>& a, const std::vector<qp::Vector>& b) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) v += a[i].dot(b[i]);
  return v;
}

Scenario small_flexible(std::uint64_t seed, int members) { return synthetic(seed, members, PvLevel::high); }

}  // namespace

TEST_CASE("tau bounds of the nash game") {
  CHECK(tau_bound_nep(kAlpha, 55, Billing::cp) == doctest::Approx(0.11824704).epsilon(1e-9));
  CHECK(tau_bound_nep(kAlpha, 55, Billing::net, 0.05) == doctest::Approx(0.011824704).epsilon(1e-9));
  CHECK(tau_bound_nep(kAlpha, 55, Billing::vcg, 0.05) == doctest::Approx(0.011824704).epsilon(1e-9));
  CHECK(tau_bound_nep(kAlpha, 1, Billing::cp) == 0.0);
  CHECK_THROWS_AS(tau_bound_nep(synthetic(1, 3), Billing::net), std::invalid_argument);
}

TEST_CASE("tau resolution") {
  GameConfig cfg;
  CHECK(resolve_tau(cfg, 2.0) == doctest::Approx(2.1));
  CHECK(resolve_tau(cfg, 0.0) == cfg.tau_floor);
  cfg.tau = 1.0;
  CHECK_THROWS_AS(resolve_tau(cfg, 2.0), std::invalid_argument);
  CHECK(resolve_tau(cfg, 0.5) == 1.0);
  cfg.allow_small_tau = true;
  CHECK(resolve_tau(cfg, 2.0) == 1.0);
  cfg.tau = -1.0;
  CHECK_THROWS_AS(resolve_tau(cfg, 0.0), std::invalid_argument);
}

TEST_CASE("player objectives") {
  SUBCASE("per-slot billing with idle rivals is the private cost plus the member's own grid term") {
    const Scenario sc = community({flat_member("a", {2, 1, 3}, {0, 2, 0}), flat_member("idle", {0, 0, 0})});
    std::mt19937_64 rng(3);
    const CommunityProfile p = random_profile(sc, Design::d1, rng);
    const Schedule& s = p.schedules[0];
    double expected = member_linear_cost(s, sc.members[0], Design::d1, sc);
    for (int t = 0; t < 3; ++t) expected += kAlpha * s.net(t) * s.net(t);
    CHECK(player_objective(sc, p, 0, s, Billing::cp, {}) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("a zero key means a zero bill") {
    const Scenario sc = small_flexible(2, 3);
    std::mt19937_64 rng(4);
    const CommunityProfile p = random_profile(sc, Design::d1, rng);
    const DistributionKeys k = normalize_keys({0.0, 1.0, 2.0});
    CHECK(player_objective(sc, p, 0, random_schedule(sc, 0, Design::d1, rng), Billing::net, k) == 0.0);
  }
  SUBCASE("under per-slot billing a deviation reaches rivals only through the aggregate") {
    const Scenario sc = small_flexible(3, 4);
    std::mt19937_64 rng(5);
    const CommunityProfile p = random_profile(sc, Design::d1, rng);
    CommunityProfile q = p;
    q.schedules[1] = random_schedule(sc, 1, Design::d1, rng);
    const std::vector<double> L0 = p.aggregate();
    const std::vector<double> L1 = q.aggregate();
    const std::vector<double> b0 = bill_cp(p, sc, Design::d1);
    const std::vector<double> b1 = bill_cp(q, sc, Design::d1);
    for (int j : {0, 2, 3}) {
      double expected = 0.0;
      for (int t = 0; t < sc.steps(); ++t) expected += p.schedules[j].net(t) * kAlpha * (L1[t] - L0[t]);
      CHECK(b1[j] - b0[j] == doctest::Approx(expected).epsilon(1e-9).scale(1e-6));
    }
  }
}

TEST_CASE("potential values") {
  SUBCASE("hand substitution with two members in one slot") {
    Scenario sc = community({flat_member("a", {2.0}), flat_member("b", {0.0}, {1.0})}, 0.001, 0.0);
    sc.tariffs.import = {0.16};
    sc.tariffs.export_ = {0.04};
    CommunityProfile p;
    Schedule a, b;
    a.l_pos = {2.0};
    a.l_neg = {0.0};
    a.p_bar = 2.0;
    b.l_pos = {0.0};
    b.l_neg = {1.0};
    p.schedules = {a, b};
    CHECK(potential_value(p, sc, Billing::cp) == doctest::Approx(0.283).epsilon(1e-12));
    CHECK(potential_value(p, sc, Billing::net) == doctest::Approx(0.281).epsilon(1e-12));
  }
  SUBCASE("a single member's per-slot potential is the social cost") {
    const Scenario sc = small_flexible(4, 1);
    std::mt19937_64 rng(6);
    const CommunityProfile p = random_profile(sc, Design::d1, rng);
    CHECK(potential_value(p, sc, Billing::cp) == doctest::Approx(total_cost(p, sc, Design::d1)).epsilon(1e-12));
  }
  SUBCASE("design is checked") {
    const Scenario sc = small_flexible(4, 2);
    std::mt19937_64 rng(7);
    CHECK_THROWS_AS(potential_value(random_profile(sc, Design::d2, rng), sc, Billing::cp), std::invalid_argument);
  }
}

TEST_CASE("unilateral deviations change bills by the weighted potential change") {
  std::mt19937_64 rng(11);
  const Scenario sc = small_flexible(5, 5);
  const DistributionKeys net = keys_net(sc);
  for (Billing billing : {Billing::cp, Billing::net}) {
    const DistributionKeys& k = net;
    for (int trial = 0; trial < 10; ++trial) {
      const CommunityProfile p = random_profile(sc, Design::d1, rng);
      const int i = trial % sc.num_members();
      CommunityProfile q = p;
      q.schedules[i] = random_schedule(sc, i, Design::d1, rng);
      const double db = player_objective(sc, p, i, q.schedules[i], billing, k) -
                        player_objective(sc, p, i, p.schedules[i], billing, k);
      const double dP = potential_value(q, sc, billing) - potential_value(p, sc, billing);
      const double weight = billing == Billing::cp ? 1.0 : k.K[i];
      CHECK(db == doctest::Approx(weight * dP).epsilon(1e-8).scale(1e-6));
    }
  }
}

TEST_CASE("per-slot game mapping is monotone") {
  std::mt19937_64 rng(12);
  const Scenario sc = small_flexible(6, 4);
  const PlayerModel model(sc, Design::d1, Billing::cp, {});
  for (int trial = 0; trial < 10; ++trial) {
    const CommunityProfile a = random_profile(sc, Design::d1, rng);
    const CommunityProfile b = random_profile(sc, Design::d1, rng);
    const auto Fa = game_gradient(model, a);
    const auto Fb = game_gradient(model, b);
    std::vector<qp::Vector> da, dF;
    for (int i = 0; i < sc.num_members(); ++i) {
      da.push_back(model.pack(i, a.schedules[i]) - model.pack(i, b.schedules[i]));
      dF.push_back(Fa[i] - Fb[i]);
    }
    CHECK(dot(da, dF) >= -1e-9);
  }
}

TEST_CASE("nash equilibria") {
  GameConfig cfg;
  cfg.max_outer = 2000;

  SUBCASE("a single member reaches its optimum with the grid term") {
    const Scenario sc = small_flexible(7, 1);
    const EquilibriumReport r = pda_solve(sc, cfg);
    CHECK(r.converged);
    CHECK(r.total_cost == doctest::Approx(solve_centralized(sc, Design::d1).cost.total).epsilon(1e-5));
  }
  SUBCASE("per-slot billing minimizes the potential") {
    const Scenario sc = small_flexible(8, 4);
    const EquilibriumReport r = pda_solve(sc, cfg);
    const CentralSolution c = solve_centralized(sc, Design::d1, CentralOptions{CentralObjective::cp_potential});
    CHECK(check_feasibility(r.profile, sc).feasible);
    CHECK(potential_value(r.profile, sc, Billing::cp) == doctest::Approx(c.objective).epsilon(1e-4));
    const BestResponseAudit a = check_nash(r.profile, sc, Billing::cp, {});
    CHECK(a.max_improvement <= 1e-4);
    const double C = solve_centralized(sc, Design::d1).cost.total;
    CHECK((r.total_cost - C) / C >= -1e-6);
  }
  SUBCASE("net billing reaches the social optimum") {
    const Scenario sc = small_flexible(9, 4);
    cfg.billing = Billing::net;
    const EquilibriumReport r = pda_solve(sc, cfg);
    const double C = solve_centralized(sc, Design::d1).cost.total;
    CHECK(r.total_cost == doctest::Approx(C).epsilon(1e-4));
    CHECK(check_nash(r.profile, sc, Billing::net, r.keys).max_improvement <= 1e-4);
    double bill_sum = 0.0;
    for (double b : r.bills) bill_sum += b;
    CHECK(bill_sum == doctest::Approx(r.total_cost).epsilon(1e-9));
  }
  SUBCASE("starting at the social optimum, net billing stops within two outer iterations") {
    const Scenario sc = small_flexible(10, 4);
    cfg.billing = Billing::net;
    const CentralSolution c = solve_centralized(sc, Design::d1);
    const EquilibriumReport r = pda_solve(sc, cfg, nullptr, &c.profile);
    CHECK(r.converged);
    CHECK(r.outer_iterations <= 2);
    CHECK(check_nash(c.profile, sc, Billing::net, r.keys).max_improvement <= 1e-4);
  }
  SUBCASE("a perturbed profile is not an equilibrium") {
    const Scenario sc = small_flexible(8, 3);
    const CentralSolution c = solve_centralized(sc, Design::d1, CentralOptions{CentralObjective::cp_potential});
    CommunityProfile p = c.profile;
    std::mt19937_64 rng(13);
    p.schedules[0] = random_schedule(sc, 0, Design::d1, rng);
    CHECK(check_nash(p, sc, Billing::cp, {}).max_improvement > 1e-3);
    CHECK(check_nash(c.profile, sc, Billing::cp, {}).max_improvement <= 1e-4);
  }
  SUBCASE("an iteration cap is reported, not hidden") {
    const Scenario sc = small_flexible(8, 3);
    cfg.max_outer = 2;
    const EquilibriumReport r = pda_solve(sc, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.outer_iterations == 2);
    CHECK(r.trace.size() == 2);
  }
  SUBCASE("tau below the bound is refused") {
    const Scenario sc = small_flexible(8, 3);
    cfg.tau = 1e-4;
    CHECK_THROWS_AS(pda_solve(sc, cfg), std::invalid_argument);
  }
}

TEST_CASE("leading principal minors of the nash Z-matrix") {
  for (int N : {3, 5, 10}) {
    for (Billing b : {Billing::cp, Billing::net}) {
      const double maxK = 0.4;
      const double bound = tau_bound_nep(kAlpha, N, b, maxK);
      CHECK(leading_minors_positive(upsilon_matrix_nep(N, kAlpha, b, maxK, 1.05 * bound)));
      CHECK_FALSE(leading_minors_positive(upsilon_matrix_nep(N, kAlpha, b, maxK, 0.5 * bound)));
    }
  }
}

TEST_CASE("eigenstructure of the coupling matrices") {
  for (int N = 1; N <= 6; ++N) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> d(coupling_matrix_d(N));
    for (int k = 0; k < 2 * N; ++k) {
      const double ev = d.eigenvalues()[k];
      CHECK((std::abs(ev) < 1e-9 || std::abs(ev - 2.0) < 1e-9));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(coupling_matrix_e(N));
    for (int k = 0; k < 2 * N - 1; ++k) CHECK(std::abs(e.eigenvalues()[k]) < 1e-9);
    CHECK(e.eigenvalues()[2 * N - 1] == doctest::Approx(2.0 * N).epsilon(1e-12));
  }
}
