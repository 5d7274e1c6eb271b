#include <doctest.h>

#include <chrono>

#include "qp_oracle.hpp"
#include "rec/qp.hpp"

using namespace rec;
using qp::kInf;
using qp::Vector;

namespace {

qp::Problem one_var(double q, double c) {
  qp::Problem p = qp::make_problem(1);
  p.Q.coeffRef(0, 0) = q;
  p.c[0] = c;
  return p;
}

}  // namespace

TEST_CASE("active lower bound: minimize x^2 s.t. x >= 1") {
  qp::Problem p = one_var(2.0, 0.0);
  p.var_lower[0] = 1.0;
  const qp::Solution s = qp::solve_qp(p);
  REQUIRE(s.ok());
  CHECK(s.z[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.bound_duals[0] == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("unconstrained least squares returns the target") {
  const int n = 5;
  qp::Problem p = qp::make_problem(n);
  Vector target(n);
  target << 1.0, -2.0, 0.5, 3.0, 0.0;
  p.Q.setIdentity();
  p.Q *= 2.0;
  p.c = -2.0 * target;
  const qp::Solution s = qp::solve_qp(p);
  REQUIRE(s.ok());
  CHECK((s.z - target).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("equality constrained: x^2 + y^2 s.t. x + y = 1") {
  qp::Problem p = qp::make_problem(2);
  p.Q.setIdentity();
  p.Q *= 2.0;
  p.A.resize(1, 2);
  p.A.insert(0, 0) = 1.0;
  p.A.insert(0, 1) = 1.0;
  p.row_lower = Vector::Constant(1, 1.0);
  p.row_upper = Vector::Constant(1, 1.0);
  const qp::Solution s = qp::solve_qp(p);
  REQUIRE(s.ok());
  CHECK(s.z[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.z[1] == doctest::Approx(0.5).epsilon(1e-9));
  // 2x + y_1 = 0 at x = 1/2
  CHECK(s.row_duals[0] == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("proximal identity and projection") {
  qp::Problem p = qp::make_problem(3);
  Vector v(3);
  v << 0.3, -1.5, 2.0;
  qp::Solution s = qp::solve_strongly_convex(p, 1.0, v);
  REQUIRE(s.ok());
  CHECK((s.z - v).lpNorm<Eigen::Infinity>() < 1e-9);

  qp::Problem box = qp::make_problem(1);
  box.var_upper[0] = 0.0;
  s = qp::solve_strongly_convex(box, 2.0, Vector::Constant(1, 1.0));
  REQUIRE(s.ok());
  CHECK(std::abs(s.z[0]) < 1e-9);
  CHECK_THROWS_AS(qp::solve_strongly_convex(box, 0.0, Vector::Zero(1)), qp::QpError);
}

TEST_CASE("solves are deterministic") {
  const auto inst = testing::make_oracle_qp(99, 40, false);
  const qp::Solution a = qp::solve_qp(inst.problem);
  const qp::Solution b = qp::solve_qp(inst.problem);
  REQUIRE(a.ok());
  CHECK(a.z == b.z);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("linear program with degenerate vertex") {
  // min -x - y s.t. x + y <= 1, x <= 1, y <= 1, x, y >= 0 (optimal face)
  qp::Problem p = qp::make_problem(2);
  p.c << -1.0, -1.0;
  p.A.resize(3, 2);
  p.A.insert(0, 0) = 1.0;
  p.A.insert(0, 1) = 1.0;
  p.A.insert(1, 0) = 1.0;
  p.A.insert(2, 1) = 1.0;
  p.row_lower = Vector::Constant(3, -kInf);
  p.row_upper = Vector::Constant(3, 1.0);
  p.var_lower = Vector::Zero(2);
  const qp::Solution s = qp::solve_qp(p);
  REQUIRE(s.ok());
  CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-9));
  const auto kkt = qp::kkt_residuals(p, s.z, s.row_duals, s.bound_duals);
  CHECK(kkt.max() < 1e-7);
}

TEST_CASE("infeasibility and unboundedness are detected") {
  qp::Problem p = qp::make_problem(1);
  p.A.resize(2, 1);
  p.A.insert(0, 0) = 1.0;
  p.A.insert(1, 0) = 1.0;
  p.row_lower = Vector(2);
  p.row_upper = Vector(2);
  p.row_lower << 1.0, -kInf;
  p.row_upper << kInf, 0.0;
  CHECK(qp::solve_qp(p).status == qp::Status::primal_infeasible);

  qp::Problem u = qp::make_problem(1);
  u.c[0] = -1.0;
  u.var_upper[0] = kInf;
  CHECK(qp::solve_qp(u).status == qp::Status::dual_infeasible);

  qp::Problem crossed = qp::make_problem(1);
  crossed.var_lower[0] = 1.0;
  crossed.var_upper[0] = 0.0;
  CHECK(qp::solve_qp(crossed).status == qp::Status::primal_infeasible);
}

TEST_CASE("validation rejects malformed and nonconvex problems") {
  qp::Problem p = qp::make_problem(2);
  p.Q.coeffRef(0, 0) = -1.0;
  CHECK_THROWS_AS(qp::solve_qp(p), qp::QpError);

  qp::Problem asym = qp::make_problem(2);
  asym.Q.coeffRef(0, 1) = 1.0;
  CHECK_THROWS_AS(qp::solve_qp(asym), qp::QpError);

  qp::Problem dims = qp::make_problem(2);
  dims.c = Vector::Zero(3);
  CHECK_THROWS_AS(qp::solve_qp(dims), qp::QpError);
}

TEST_CASE("warm start reproduces the optimum") {
  const auto inst = testing::make_oracle_qp(5, 60, false);
  const qp::Solution cold = qp::solve_qp(inst.problem);
  REQUIRE(cold.ok());
  const qp::WarmStart ws{cold.z, cold.row_duals, cold.bound_duals};
  const qp::Solution warm = qp::solve_qp(inst.problem, {}, &ws);
  REQUIRE(warm.ok());
  CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
  CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("property: random PSD QPs satisfy KKT and match the oracle") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 5 + static_cast<int>((seed * 37) % 120);
    const bool eq_only = seed % 4 == 0;
    const auto inst = testing::make_oracle_qp(seed, n, eq_only);
    const qp::Solution s = qp::solve_qp(inst.problem);
    INFO("seed " << seed << " n " << n);
    REQUIRE(s.ok());
    const auto kkt = qp::kkt_residuals(inst.problem, s.z, s.row_duals, s.bound_duals);
    CHECK(kkt.stationarity <= 1e-7);
    CHECK(kkt.primal <= 1e-7);
    CHECK(kkt.complementarity <= 1e-7);
    const double ref = eq_only ? testing::dense_equality_reference(inst.problem) : inst.objective;
    CHECK(std::abs(s.objective - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
  }
}
