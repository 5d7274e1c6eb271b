#pragma once

#include <vector>

#include "rec/model.hpp"
#include "rec/qp.hpp"
#include "rec/scenario.hpp"

namespace rec {

/// Components of the community bill. Revenues are positive numbers.
struct CostBreakdown {
  double retail_import = 0.0;
  double retail_export = 0.0;  // revenue
  double local_import = 0.0;   // D2 only
  double local_export = 0.0;   // D2 only, revenue
  double upstream = 0.0;       // alpha * sum_t L_t^2
  double peak = 0.0;           // beta * sum_i p_bar_i
  double total = 0.0;
};

/// Per-member linear part of the bill (commodity and peak terms) in the
/// member's column space. The upstream term is not included.
qp::Vector linear_cost(const MemberAssets& member, Design design, const Horizon& horizon,
                       const Tariffs& tariffs);

/// Linear part of one member's bill evaluated on a schedule.
double member_linear_cost(const Schedule& schedule, const MemberAssets& member, Design design,
                          const Scenario& scenario);

/// Throws std::invalid_argument when the profile was not built for `design`.
CostBreakdown cost_breakdown(const CommunityProfile& profile, const Scenario& scenario, Design design);
double total_cost(const CommunityProfile& profile, const Scenario& scenario, Design design);

/// Social cost, or the potential of the per-slot (CP) billing game:
/// social - (alpha/2) sum_t sum_i l_i L_{-i}.
enum class CentralObjective { social, cp_potential };

struct CentralOptions {
  CentralObjective objective = CentralObjective::social;
  qp::Settings settings = qp::Settings{};
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, qp::Status status) : std::runtime_error(what), status_(status) {}
  qp::Status status() const noexcept { return status_; }

 private:
  qp::Status status_;
};

struct CentralSolution {
  CommunityProfile profile;
  CostBreakdown cost;
  double objective = 0.0;            // value of the minimized function
  std::vector<double> balance_price;  // D2: multiplier of the community balance rows
  qp::Solution qp;
};

/// Stacks every member into one QP. The optimum value is unique; the profile
/// is one element of the optimal set.
CentralSolution solve_centralized(const Scenario& scenario, Design design, const CentralOptions& options = {});

struct BenchmarkSolution {
  CommunityProfile profile;           // design D1
  std::vector<double> member_costs;   // commodity + peak, per member
  double upstream = 0.0;
  double total = 0.0;
};

/// Every member minimizes its own commodity and peak cost; the upstream term
/// is added afterwards on the resulting aggregate.
BenchmarkSolution solve_individual_benchmark(const Scenario& scenario, const qp::Settings& settings = {});

/// Optimal centralized cost of the community without member `excluded`.
double solve_leave_one_out(const Scenario& scenario, Design design, int excluded,
                           const CentralOptions& options = {});

}  // namespace rec
