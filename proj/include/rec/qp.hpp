#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

/// Sparse convex quadratic programming.
///
///   minimize    1/2 z'Qz + c'z
///   subject to  row_lower <= A z <= row_upper
///               var_lower <=   z <= var_upper
///
/// Equality rows have row_lower == row_upper. Infinite bounds are allowed.
/// The solver is an operator-splitting (ADMM) scheme with over-relaxation,
/// Ruiz equilibration, adaptive step size and infeasibility certificates,
/// finished by an active-set polish on a reduced KKT system.
namespace rec::qp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
  SparseMatrix Q;  // symmetric, full storage
  Vector c;
  SparseMatrix A;
  Vector row_lower;
  Vector row_upper;
  Vector var_lower;
  Vector var_upper;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(A.rows()); }

  double objective(const Vector& z) const { return 0.5 * z.dot(Q * z) + c.dot(z); }
};

/// Empty problem with n free variables and no rows.
Problem make_problem(int n);

enum class Status { optimal, primal_infeasible, dual_infeasible, iteration_limit };

std::string to_string(Status status);

struct Settings {
  double eps_abs = 1e-8;       // absolute KKT tolerance (unscaled)
  double eps_rel = 0.0;        // relative part, scaled by the usual norms
  double eps_infeasible = 1e-9;
  int max_iter = 50000;
  double rho = 0.1;
  double sigma = 1e-6;
  double relaxation = 1.6;
  bool adaptive_rho = true;
  int check_interval = 10;
  int scaling_iterations = 10;
  bool polish = true;
  double polish_delta = 1e-6;
  int polish_refine_iterations = 30;
  int polish_rounds = 6;
  double polish_trigger = 1e-2;  // try an early polish once residuals fall below this
  int polish_interval = 50;
  bool check_convexity = true;
};

/// Tolerances used for strongly convex (proximal) subproblems.
Settings strongly_convex_settings();

/// Dual sign convention: at the optimum Qz + c + A'y + w = 0 with y_i >= 0
/// when the upper row bound is active and y_i <= 0 when the lower one is.
/// `bound_duals` (w) follows the same convention for variable bounds.
struct Solution {
  Vector z;
  Vector row_duals;
  Vector bound_duals;
  Status status = Status::iteration_limit;
  double objective = 0.0;
  double primal_residual = kInf;
  double dual_residual = kInf;
  double complementarity = kInf;
  int iterations = 0;
  bool polished = false;

  bool ok() const { return status == Status::optimal; }
};

struct WarmStart {
  Vector z;
  Vector row_duals;
  Vector bound_duals;
};

struct KktResiduals {
  double stationarity = 0.0;    // ||Qz + c + A'y + w||_inf
  double primal = 0.0;          // largest row or bound violation
  double complementarity = 0.0; // largest |multiplier * slack| and sign violation

  double max() const { return std::max({stationarity, primal, complementarity}); }
};

KktResiduals kkt_residuals(const Problem& problem, const Vector& z, const Vector& row_duals,
                           const Vector& bound_duals);

class QpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws QpError on inconsistent dimensions, asymmetric or indefinite Q.
void validate(const Problem& problem, bool check_convexity = true);

Solution solve_qp(const Problem& problem, const Settings& settings = {},
                  const WarmStart* warm_start = nullptr);

/// Adds tau/2 ||z - center||^2 to the objective and solves the (unique) minimizer.
Solution solve_strongly_convex(const Problem& problem, double tau, const Vector& center,
                               const Settings& settings = strongly_convex_settings(),
                               const WarmStart* warm_start = nullptr);

/// Helper used by model builders: adds tau/2 ||z - center||^2 in place.
void add_proximal_term(Problem& problem, double tau, const Vector& center);

}  // namespace rec::qp
