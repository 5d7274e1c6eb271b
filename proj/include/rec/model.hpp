#pragma once

#include <string>
#include <vector>

#include "rec/qp.hpp"
#include "rec/scenario.hpp"

namespace rec {

/// D1: coupled demand-side management. D2: D1 plus the community pool for
/// excess generation (virtual flows i_com/e_com and retail splits i_ret/e_ret).
enum class Design { d1, d2 };

std::string to_string(Design design);
Design parse_design(const std::string& text);

/// Column offsets of one member's decision vector. Ordering: appliance
/// energies x[a][t] (appliance-major), battery power s[t] and state of charge
/// soc[t] (after step t) when a battery exists, l_pos[t], l_neg[t], p_bar,
/// then for D2 i_com[t], e_com[t], i_ret[t], e_ret[t].
class VariableLayout {
 public:
  VariableLayout(const MemberAssets& member, Design design, const Horizon& horizon);

  Design design() const { return design_; }
  int steps() const { return steps_; }
  int num_appliances() const { return num_appliances_; }
  bool has_battery() const { return has_battery_; }
  int size() const { return size_; }

  int x(int a, int t) const { return a * steps_ + t; }
  int s(int t) const { return s_ + t; }
  int soc(int t) const { return soc_ + t; }
  int l_pos(int t) const { return l_pos_ + t; }
  int l_neg(int t) const { return l_neg_ + t; }
  int p_bar() const { return p_bar_; }
  int i_com(int t) const { return i_com_ + t; }
  int e_com(int t) const { return e_com_ + t; }
  int i_ret(int t) const { return i_ret_ + t; }
  int e_ret(int t) const { return e_ret_ + t; }

  std::vector<std::string> names() const;

 private:
  Design design_;
  int steps_;
  int num_appliances_;
  bool has_battery_;
  int s_ = -1, soc_ = -1, l_pos_ = 0, l_neg_ = 0, p_bar_ = 0;
  int i_com_ = -1, e_com_ = -1, i_ret_ = -1, e_ret_ = -1;
  int size_ = 0;
};

inline VariableLayout variable_layout(const MemberAssets& member, Design design, const Horizon& horizon) {
  return VariableLayout(member, design, horizon);
}

/// One member's decision vector in named form. D2-only vectors are empty for D1.
struct Schedule {
  std::vector<std::vector<double>> x;  // [appliance][t], kWh
  std::vector<double> s;               // kW, empty without battery
  std::vector<double> soc;             // kWh after each step, empty without battery
  std::vector<double> l_pos;           // kWh
  std::vector<double> l_neg;           // kWh
  double p_bar = 0.0;                  // kW
  std::vector<double> i_com, e_com, i_ret, e_ret;

  double net(int t) const { return l_pos[t] - l_neg[t]; }
  bool operator==(const Schedule&) const = default;
};

Schedule unpack(const VariableLayout& layout, const qp::Vector& theta);
qp::Vector pack(const VariableLayout& layout, const Schedule& schedule);

/// Zero virtual flows; retail splits equal the physical import/export.
Schedule to_design2(const Schedule& schedule);
/// Drops the virtual flow vectors.
Schedule to_design1(const Schedule& schedule);

struct CommunityProfile {
  Design design = Design::d1;
  std::vector<Schedule> schedules;

  int num_members() const { return static_cast<int>(schedules.size()); }
  /// Aggregate net load L[t] = sum_i (l_pos - l_neg).
  std::vector<double> aggregate() const;
  bool operator==(const CommunityProfile&) const = default;
};

CommunityProfile convert(const CommunityProfile& profile, Design design);

/// Rows  lower <= sum coeff * theta <= upper  plus variable bounds, in the
/// member's own column space.
struct LinearConstraintBlock {
  int num_vars = 0;
  std::vector<qp::Triplet> coefficients;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> family;
  qp::Vector var_lower;
  qp::Vector var_upper;

  int num_rows() const { return static_cast<int>(lower.size()); }
  int add_row(std::string row_family, double lo, double hi);
  qp::SparseMatrix matrix() const;
};

LinearConstraintBlock individual_constraints(const MemberAssets& member, Design design,
                                             const Horizon& horizon);

/// QP over one member's variables with the individual constraints and a zero objective.
qp::Problem member_problem(const MemberAssets& member, Design design, const Horizon& horizon);

/// h(Theta)[t] = sum_i e_com[i][t] - i_com[i][t]. Throws for D1 profiles.
std::vector<double> shared_constraint_residual(const CommunityProfile& profile);

struct NetLoad {
  double net = 0.0;
  double pos = 0.0;
  double neg = 0.0;
};

/// Physical net load of one member at t from appliance, battery and the
/// member's base load and generation, split into import/export parts.
NetLoad net_load(const Schedule& schedule, const MemberAssets& member, int t, double dt);

struct Violation {
  std::string family;
  double amount = 0.0;
  int member = -1;
  int step = -1;
};

struct FeasibilityReport {
  std::vector<Violation> worst;  // worst violation per family, only families above tolerance
  double max_violation = 0.0;
  bool feasible = true;

  const Violation* find(const std::string& family) const;
};

FeasibilityReport check_feasibility(const CommunityProfile& profile, const Scenario& scenario,
                                    double tol = 1e-6);

}  // namespace rec
