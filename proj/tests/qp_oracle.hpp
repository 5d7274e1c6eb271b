#pragma once

// Random convex QPs with a known optimum, built by choosing a primal point,
// an active set and multipliers first and deriving c from stationarity.
// Equality-only instances are also solvable through a dense KKT system.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rec/qp.hpp"

namespace rec::testing {

struct OracleQp {
  qp::Problem problem;
  Eigen::VectorXd z_star;
  double objective = 0.0;
  bool equality_only = false;
};

inline OracleQp make_oracle_qp(std::uint64_t seed, int n, bool equality_only) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  OracleQp out;
  out.equality_only = equality_only;
  qp::Problem& p = out.problem;
  p = qp::make_problem(n);

  // Q = M'M, rank deficient unless the instance is equality-only.
  const int rank = equality_only ? n : std::max(1, static_cast<int>(n * (0.3 + 0.6 * u01(rng))));
  std::vector<qp::Triplet> mt;
  const double density = std::min(1.0, 4.0 / n + 0.02);
  for (int r = 0; r < rank; ++r) {
    mt.emplace_back(r, r % n, 1.0 + u01(rng));
    for (int j = 0; j < n; ++j) {
      if (u01(rng) < density) mt.emplace_back(r, j, gauss(rng));
    }
  }
  qp::SparseMatrix M(rank, n);
  M.setFromTriplets(mt.begin(), mt.end());
  p.Q = qp::SparseMatrix(M.transpose() * M);
  if (equality_only) {
    for (int j = 0; j < n; ++j) p.Q.coeffRef(j, j) += 0.1;
  }
  p.Q.makeCompressed();

  const int m_eq = std::max(1, n / 4);
  const int m_in = equality_only ? 0 : n / 2;
  const int m = m_eq + m_in;
  std::vector<qp::Triplet> at;
  for (int i = 0; i < m; ++i) {
    at.emplace_back(i, static_cast<int>(u01(rng) * n) % n, 1.0 + u01(rng));
    for (int j = 0; j < n; ++j) {
      if (u01(rng) < density) at.emplace_back(i, j, gauss(rng));
    }
  }
  p.A.resize(m, n);
  p.A.setFromTriplets(at.begin(), at.end());
  p.A.makeCompressed();

  Eigen::VectorXd z(n);
  for (int j = 0; j < n; ++j) z[j] = 2.0 * gauss(rng);
  const Eigen::VectorXd Az = p.A * z;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  p.row_lower.resize(m);
  p.row_upper.resize(m);
  for (int i = 0; i < m; ++i) {
    if (i < m_eq) {
      p.row_lower[i] = p.row_upper[i] = Az[i];
      y[i] = gauss(rng);
      continue;
    }
    const double roll = u01(rng);
    if (roll < 0.3) {  // lower active
      p.row_lower[i] = Az[i];
      p.row_upper[i] = u01(rng) < 0.5 ? qp::kInf : Az[i] + 1.0 + u01(rng);
      y[i] = -(0.1 + u01(rng));
    } else if (roll < 0.6) {  // upper active
      p.row_upper[i] = Az[i];
      p.row_lower[i] = u01(rng) < 0.5 ? -qp::kInf : Az[i] - 1.0 - u01(rng);
      y[i] = 0.1 + u01(rng);
    } else {
      p.row_lower[i] = Az[i] - 0.5 - u01(rng);
      p.row_upper[i] = u01(rng) < 0.3 ? qp::kInf : Az[i] + 0.5 + u01(rng);
    }
  }
  if (!equality_only) {
    for (int j = 0; j < n; ++j) {
      const double roll = u01(rng);
      if (roll < 0.15) {
        p.var_lower[j] = z[j];
        p.var_upper[j] = z[j] + 1.0 + u01(rng);
        w[j] = -(0.1 + u01(rng));
      } else if (roll < 0.3) {
        p.var_upper[j] = z[j];
        p.var_lower[j] = -qp::kInf;
        w[j] = 0.1 + u01(rng);
      } else if (roll < 0.5) {
        p.var_lower[j] = z[j] - 1.0 - u01(rng);
        p.var_upper[j] = z[j] + 1.0 + u01(rng);
      }
    }
  }
  p.c = -(p.Q * z + p.A.transpose() * y + w);
  out.z_star = z;
  out.objective = p.objective(z);
  return out;
}

/// Dense direct solve of the equality-constrained KKT system.
inline double dense_equality_reference(const qp::Problem& p) {
  const int n = p.num_vars();
  const int m = p.num_rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = Eigen::MatrixXd(p.Q);
  const Eigen::MatrixXd A(p.A);
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  Eigen::VectorXd rhs(n + m);
  rhs.head(n) = -p.c;
  rhs.tail(m) = p.row_lower;
  const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
  return p.objective(sol.head(n));
}

}  // namespace rec::testing
