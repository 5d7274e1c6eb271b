#include "rec/qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>

namespace rec::qp {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoEqualityFactor = 1e3;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Column-wise infinity norms of a column-major sparse matrix.
Vector column_norms(const SparseMatrix& M) {
  Vector out = Vector::Zero(M.cols());
  for (int j = 0; j < M.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(M, j); it; ++it) out[j] = std::max(out[j], std::abs(it.value()));
  }
  return out;
}

Vector row_norms(const SparseMatrix& M) {
  Vector out = Vector::Zero(M.rows());
  for (int j = 0; j < M.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(M, j); it; ++it) {
      out[it.row()] = std::max(out[it.row()], std::abs(it.value()));
    }
  }
  return out;
}

double scale_factor(double norm) {
  if (norm < 1e-4) return 1.0;
  return std::clamp(1.0 / std::sqrt(norm), 1e-4, 1e4);
}

// Problem in the solver's internal form: bounds folded into constraint rows,
// then equilibrated. x = D xs, z = Einv zs, y = E ys / cost.
struct Scaled {
  int n = 0;
  int m = 0;         // rows of the original A
  int m_total = 0;   // plus bound rows
  std::vector<int> bound_vars;
  SparseMatrix P;    // full symmetric
  SparseMatrix A;
  Vector q, l, u;
  Vector D, E;
  double cost = 1.0;
  std::vector<bool> equality;
};

Scaled build_scaled(const Problem& pb, int scaling_iterations) {
  Scaled s;
  s.n = pb.num_vars();
  s.m = pb.num_rows();
  for (int j = 0; j < s.n; ++j) {
    if (std::isfinite(pb.var_lower[j]) || std::isfinite(pb.var_upper[j])) s.bound_vars.push_back(j);
  }
  s.m_total = s.m + static_cast<int>(s.bound_vars.size());

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(pb.A.nonZeros()) + s.bound_vars.size());
  for (int j = 0; j < pb.A.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(pb.A, j); it; ++it) {
      if (it.value() != 0.0) trips.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
  }
  s.l.resize(s.m_total);
  s.u.resize(s.m_total);
  s.l.head(s.m) = pb.row_lower;
  s.u.head(s.m) = pb.row_upper;
  for (std::size_t k = 0; k < s.bound_vars.size(); ++k) {
    const int row = s.m + static_cast<int>(k);
    const int j = s.bound_vars[k];
    trips.emplace_back(row, j, 1.0);
    s.l[row] = pb.var_lower[j];
    s.u[row] = pb.var_upper[j];
  }
  s.A.resize(s.m_total, s.n);
  s.A.setFromTriplets(trips.begin(), trips.end());
  s.A.makeCompressed();
  s.P = pb.Q;
  s.P.prune(0.0);
  s.P.makeCompressed();
  s.q = pb.c;

  s.equality.resize(static_cast<std::size_t>(s.m_total));
  for (int i = 0; i < s.m_total; ++i) {
    s.equality[i] = std::isfinite(s.l[i]) && std::isfinite(s.u[i]) &&
                    std::abs(s.u[i] - s.l[i]) <= 1e-12 * std::max(1.0, std::abs(s.l[i]));
  }

  // Modified Ruiz equilibration of [P A'; A 0].
  s.D = Vector::Ones(s.n);
  s.E = Vector::Ones(s.m_total);
  for (int it = 0; it < scaling_iterations; ++it) {
    Vector col = column_norms(s.P).cwiseMax(column_norms(s.A));
    Vector row = row_norms(s.A);
    Vector d = col.unaryExpr([](double v) { return scale_factor(v); });
    Vector e = row.unaryExpr([](double v) { return scale_factor(v); });
    s.P = d.asDiagonal() * s.P * d.asDiagonal();
    s.A = e.asDiagonal() * s.A * d.asDiagonal();
    s.D = s.D.cwiseProduct(d);
    s.E = s.E.cwiseProduct(e);
  }
  s.q = s.D.cwiseProduct(s.q);
  if (scaling_iterations > 0) {
    const Vector pc = column_norms(s.P);
    const double mean_p = s.n > 0 ? pc.mean() : 0.0;
    const double ref = std::max(mean_p, inf_norm(s.q));
    s.cost = ref < 1e-4 ? 1.0 : std::clamp(1.0 / ref, 1e-4, 1e4);
  }
  s.P *= s.cost;
  s.q *= s.cost;
  for (int i = 0; i < s.m_total; ++i) {
    s.l[i] = std::isfinite(s.l[i]) ? s.l[i] * s.E[i] : s.l[i];
    s.u[i] = std::isfinite(s.u[i]) ? s.u[i] * s.E[i] : s.u[i];
  }
  s.P.makeCompressed();
  s.A.makeCompressed();
  return s;
}

// Quasi-definite KKT matrix [P + sigma I, A'; A, -diag(1/rho)] (lower part)
// with cached positions of the rho entries.
class KktSystem {
 public:
  KktSystem(const Scaled& s, double sigma, const Vector& rho) : n_(s.n), m_(s.m_total) {
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(s.P.nonZeros() + s.A.nonZeros() + n_ + m_));
    for (int j = 0; j < s.P.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(s.P, j); it; ++it) {
        if (it.row() > j) trips.emplace_back(static_cast<int>(it.row()), j, it.value());
      }
    }
    Vector diag = Vector::Constant(n_, sigma);
    for (int j = 0; j < s.P.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(s.P, j); it; ++it) {
        if (it.row() == j) diag[j] += it.value();
      }
    }
    for (int j = 0; j < n_; ++j) trips.emplace_back(j, j, diag[j]);
    for (int j = 0; j < s.A.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(s.A, j); it; ++it) {
        trips.emplace_back(n_ + static_cast<int>(it.row()), j, it.value());
      }
    }
    for (int i = 0; i < m_; ++i) trips.emplace_back(n_ + i, n_ + i, -1.0 / rho[i]);
    K_.resize(n_ + m_, n_ + m_);
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();

    rho_pos_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      const int col = n_ + i;
      for (int p = K_.outerIndexPtr()[col]; p < K_.outerIndexPtr()[col + 1]; ++p) {
        if (K_.innerIndexPtr()[p] == col) {
          rho_pos_[i] = p;
          break;
        }
      }
    }
    ldlt_.analyzePattern(K_);
    ldlt_.factorize(K_);
  }

  bool ok() const { return ldlt_.info() == Eigen::Success; }

  void update_rho(const Vector& rho) {
    for (int i = 0; i < m_; ++i) K_.valuePtr()[rho_pos_[i]] = -1.0 / rho[i];
    ldlt_.factorize(K_);
  }

  Vector solve(const Vector& rhs) const { return ldlt_.solve(rhs); }

 private:
  int n_;
  int m_;
  SparseMatrix K_;
  std::vector<int> rho_pos_;
  Ldlt ldlt_;
};

struct Residuals {
  double prim = kInf;
  double dual = kInf;
  double eps_prim = 0.0;
  double eps_dual = 0.0;
  bool converged() const { return prim <= eps_prim && dual <= eps_dual; }
};

Residuals compute_residuals(const Scaled& s, const Settings& st, const Vector& x, const Vector& z,
                            const Vector& y) {
  Residuals r;
  const Vector Ax = s.A * x;
  const Vector Px = s.P * x;
  const Vector Aty = s.A.transpose() * y;
  const Vector Einv = s.E.cwiseInverse();
  const Vector Dinv = s.D.cwiseInverse();
  r.prim = inf_norm(Einv.cwiseProduct(Ax - z));
  r.dual = inf_norm(Dinv.cwiseProduct(Px + s.q + Aty)) / s.cost;
  r.eps_prim = st.eps_abs + st.eps_rel * std::max(inf_norm(Einv.cwiseProduct(Ax)), inf_norm(Einv.cwiseProduct(z)));
  r.eps_dual = st.eps_abs + st.eps_rel / s.cost *
                                std::max({inf_norm(Dinv.cwiseProduct(Px)), inf_norm(Dinv.cwiseProduct(Aty)),
                                          inf_norm(Dinv.cwiseProduct(s.q))});
  return r;
}

Vector project(const Vector& v, const Vector& l, const Vector& u) { return v.cwiseMax(l).cwiseMin(u); }

// Active-set polish on the scaled problem. Returns true when the polished
// point meets the tolerances; x, z, y are replaced in that case.
bool polish(const Scaled& s, const Settings& st, Vector& x, Vector& z, Vector& y, Residuals& res) {
  enum class Act : unsigned char { none, lower, upper, eq };
  const int n = s.n;
  const int m = s.m_total;
  std::vector<Act> act(static_cast<std::size_t>(m), Act::none);
  for (int i = 0; i < m; ++i) {
    if (s.equality[i]) act[i] = Act::eq;
    else if (z[i] - s.l[i] < -y[i]) act[i] = Act::lower;
    else if (s.u[i] - z[i] < y[i]) act[i] = Act::upper;
  }

  // Row-major copy for row extraction.
  const Eigen::SparseMatrix<double, Eigen::RowMajor, int> Arow = s.A;
  Vector xp = x;
  Vector yr;
  std::vector<int> rows;
  bool solved = false;
  for (int round = 0; round < std::max(1, st.polish_rounds); ++round) {
    rows.clear();
    for (int i = 0; i < m; ++i) {
      if (act[i] != Act::none) rows.push_back(i);
    }
    const int k = static_cast<int>(rows.size());
    std::vector<Triplet> trips;
    std::vector<Triplet> trips_ar;
    for (int j = 0; j < s.P.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(s.P, j); it; ++it) {
        if (it.row() >= j) trips.emplace_back(static_cast<int>(it.row()), j, it.value());
      }
    }
    for (int j = 0; j < n; ++j) trips.emplace_back(j, j, st.polish_delta);
    Vector rhs(n + k);
    rhs.head(n) = -s.q;
    for (int r = 0; r < k; ++r) {
      const int i = rows[r];
      for (Eigen::SparseMatrix<double, Eigen::RowMajor, int>::InnerIterator it(Arow, i); it; ++it) {
        trips.emplace_back(n + r, static_cast<int>(it.col()), it.value());
        trips_ar.emplace_back(r, static_cast<int>(it.col()), it.value());
      }
      trips.emplace_back(n + r, n + r, -st.polish_delta);
      rhs[n + r] = act[i] == Act::upper ? s.u[i] : s.l[i];
    }
    SparseMatrix K(n + k, n + k);
    K.setFromTriplets(trips.begin(), trips.end());
    SparseMatrix Ar(k, n);
    Ar.setFromTriplets(trips_ar.begin(), trips_ar.end());
    Ldlt ldlt(K);
    if (ldlt.info() != Eigen::Success) return false;

    auto apply_exact = [&](const Vector& v) {
      Vector out(n + k);
      out.head(n) = s.P * v.head(n) + Ar.transpose() * v.tail(k);
      out.tail(k) = Ar * v.head(n);
      return out;
    };
    // Refinement started from the current iterate converges to the solution
    // of the exact reduced system nearest to it, also when that system is singular.
    Vector sol(n + k);
    sol.head(n) = xp;
    for (int r = 0; r < k; ++r) sol[n + r] = y[rows[r]];
    const double rhs_scale = std::max(1.0, inf_norm(rhs));
    for (int it = 0; it < std::max(1, st.polish_refine_iterations); ++it) {
      const Vector r = rhs - apply_exact(sol);
      if (inf_norm(r) <= 1e-14 * rhs_scale) break;
      sol += ldlt.solve(r);
    }
    if (!sol.allFinite()) return false;
    xp = sol.head(n);
    yr = sol.tail(k);

    bool changed = false;
    const Vector Ax = s.A * xp;
    for (int r = 0; r < k; ++r) {
      const int i = rows[r];
      const double sign_tol = 1e-11 * std::max(1.0, std::abs(yr[r]));
      if ((act[i] == Act::lower && yr[r] > sign_tol) || (act[i] == Act::upper && yr[r] < -sign_tol)) {
        act[i] = Act::none;
        changed = true;
      }
    }
    for (int i = 0; i < m; ++i) {
      if (act[i] != Act::none) continue;
      const double tol = 0.1 * st.eps_abs * s.E[i];
      if (Ax[i] < s.l[i] - tol) {
        act[i] = Act::lower;
        changed = true;
      } else if (Ax[i] > s.u[i] + tol) {
        act[i] = Act::upper;
        changed = true;
      }
    }
    if (!changed) {
      solved = true;
      break;
    }
  }
  if (!solved) return false;

  Vector yp = Vector::Zero(m);
  for (std::size_t r = 0; r < rows.size(); ++r) yp[rows[r]] = yr[static_cast<int>(r)];
  const Vector zp = project(s.A * xp, s.l, s.u);
  const Residuals pr = compute_residuals(s, st, xp, zp, yp);
  if (!pr.converged()) return false;
  x = xp;
  z = zp;
  y = yp;
  res = pr;
  return true;
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::primal_infeasible: return "primal_infeasible";
    case Status::dual_infeasible: return "dual_infeasible";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

Problem make_problem(int n) {
  Problem p;
  p.Q.resize(n, n);
  p.c = Vector::Zero(n);
  p.A.resize(0, n);
  p.row_lower.resize(0);
  p.row_upper.resize(0);
  p.var_lower = Vector::Constant(n, -kInf);
  p.var_upper = Vector::Constant(n, kInf);
  return p;
}

Settings strongly_convex_settings() {
  Settings s;
  s.eps_abs = 1e-8;
  return s;
}

void validate(const Problem& pb, bool check_convexity) {
  const int n = pb.num_vars();
  if (pb.Q.rows() != n || pb.Q.cols() != n) throw QpError("Q must be n x n");
  if (pb.A.cols() != n) throw QpError("A must have n columns");
  if (pb.row_lower.size() != pb.A.rows() || pb.row_upper.size() != pb.A.rows()) {
    throw QpError("row bound vectors must match the rows of A");
  }
  if (pb.var_lower.size() != n || pb.var_upper.size() != n) throw QpError("variable bounds must have n entries");
  if (!pb.c.allFinite()) throw QpError("c must be finite");
  const SparseMatrix asym = SparseMatrix(pb.Q.transpose()) - pb.Q;
  double qmax = 0.0;
  for (int j = 0; j < pb.Q.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(pb.Q, j); it; ++it) qmax = std::max(qmax, std::abs(it.value()));
  }
  for (int j = 0; j < asym.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(asym, j); it; ++it) {
      if (std::abs(it.value()) > 1e-12 * std::max(1.0, qmax)) throw QpError("Q must be symmetric");
    }
  }
  if (check_convexity && n > 0 && pb.Q.nonZeros() > 0) {
    SparseMatrix shifted = pb.Q;
    for (int j = 0; j < n; ++j) shifted.coeffRef(j, j) += 1e-9;
    Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt(shifted);
    if (llt.info() != Eigen::Success) throw QpError("Q is not positive semidefinite");
  }
}

KktResiduals kkt_residuals(const Problem& pb, const Vector& z, const Vector& row_duals,
                           const Vector& bound_duals) {
  KktResiduals r;
  r.stationarity = inf_norm(pb.Q * z + pb.c + pb.A.transpose() * row_duals + bound_duals);
  const Vector Az = pb.A * z;
  auto account = [&r](double value, double lo, double hi, double dual) {
    r.primal = std::max({r.primal, lo - value, value - hi});
    if (dual > 0.0) {
      r.complementarity = std::max(r.complementarity, std::isfinite(hi) ? dual * std::abs(hi - value) : dual);
    } else if (dual < 0.0) {
      r.complementarity = std::max(r.complementarity, std::isfinite(lo) ? -dual * std::abs(value - lo) : -dual);
    }
  };
  for (int i = 0; i < Az.size(); ++i) account(Az[i], pb.row_lower[i], pb.row_upper[i], row_duals[i]);
  for (int j = 0; j < z.size(); ++j) account(z[j], pb.var_lower[j], pb.var_upper[j], bound_duals[j]);
  return r;
}

Solution solve_qp(const Problem& pb, const Settings& st, const WarmStart* warm) {
  validate(pb, st.check_convexity);
  const int n = pb.num_vars();

  Solution sol;
  sol.z = Vector::Zero(n);
  sol.row_duals = Vector::Zero(pb.num_rows());
  sol.bound_duals = Vector::Zero(n);

  for (int i = 0; i < pb.num_rows(); ++i) {
    if (pb.row_lower[i] > pb.row_upper[i]) {
      sol.status = Status::primal_infeasible;
      return sol;
    }
  }
  for (int j = 0; j < n; ++j) {
    if (pb.var_lower[j] > pb.var_upper[j]) {
      sol.status = Status::primal_infeasible;
      return sol;
    }
  }

  const Scaled s = build_scaled(pb, st.scaling_iterations);
  const int m = s.m_total;

  Vector rho(m);
  auto fill_rho = [&](double base) {
    for (int i = 0; i < m; ++i) {
      if (!std::isfinite(s.l[i]) && !std::isfinite(s.u[i])) rho[i] = kRhoMin;
      else if (s.equality[i]) rho[i] = std::min(kRhoMax, kRhoEqualityFactor * base);
      else rho[i] = base;
    }
  };
  double rho_base = std::clamp(st.rho, kRhoMin, kRhoMax);
  fill_rho(rho_base);

  KktSystem kkt(s, st.sigma, rho);
  if (!kkt.ok()) throw QpError("KKT factorization failed");

  Vector x = Vector::Zero(n);
  Vector z = Vector::Zero(m);
  Vector y = Vector::Zero(m);
  if (warm != nullptr && warm->z.size() == n) {
    x = s.D.cwiseInverse().cwiseProduct(warm->z);
    z = project(s.A * x, s.l, s.u);
    if (warm->row_duals.size() == pb.num_rows() && warm->bound_duals.size() == n) {
      Vector yu(m);
      yu.head(s.m) = warm->row_duals;
      for (std::size_t k = 0; k < s.bound_vars.size(); ++k) {
        yu[s.m + static_cast<int>(k)] = warm->bound_duals[s.bound_vars[k]];
      }
      y = s.cost * s.E.cwiseInverse().cwiseProduct(yu);
    }
  }

  auto finish = [&](Status status, const Residuals& res, int iterations, bool polished) {
    sol.status = status;
    sol.iterations = iterations;
    sol.polished = polished;
    sol.z = s.D.cwiseProduct(x);
    const Vector yu = s.E.cwiseProduct(y) / s.cost;
    sol.row_duals = yu.head(s.m);
    sol.bound_duals = Vector::Zero(n);
    for (std::size_t k = 0; k < s.bound_vars.size(); ++k) {
      sol.bound_duals[s.bound_vars[k]] = yu[s.m + static_cast<int>(k)];
    }
    sol.objective = pb.objective(sol.z);
    sol.primal_residual = res.prim;
    sol.dual_residual = res.dual;
    sol.complementarity = kkt_residuals(pb, sol.z, sol.row_duals, sol.bound_duals).complementarity;
    return sol;
  };

  const double alpha = st.relaxation;
  Vector rhs(n + m);
  Vector x_prev = x;
  Vector y_prev = y;
  Residuals res;
  int last_polish = -st.polish_interval;
  int polish_gap = st.polish_interval;
  int checks = 0;

  for (int iter = 1; iter <= st.max_iter; ++iter) {
    x_prev = x;
    y_prev = y;
    rhs.head(n) = st.sigma * x - s.q;
    rhs.tail(m) = z - y.cwiseQuotient(rho);
    const Vector sol_kkt = kkt.solve(rhs);
    const Vector x_tilde = sol_kkt.head(n);
    const Vector z_tilde = z + (sol_kkt.tail(m) - y).cwiseQuotient(rho);
    x = alpha * x_tilde + (1.0 - alpha) * x_prev;
    const Vector z_relaxed = alpha * z_tilde + (1.0 - alpha) * z;
    z = project(z_relaxed + y.cwiseQuotient(rho), s.l, s.u);
    y = y + rho.cwiseProduct(z_relaxed - z);

    if (iter % st.check_interval != 0 && iter != 1) continue;
    ++checks;
    res = compute_residuals(s, st, x, z, y);

    if (res.converged()) {
      Residuals pres = res;
      bool polished = false;
      if (st.polish) polished = polish(s, st, x, z, y, pres);
      return finish(Status::optimal, polished ? pres : res, iter, polished);
    }
    if (st.polish && std::max(res.prim, res.dual) <= st.polish_trigger &&
        iter - last_polish >= polish_gap) {
      last_polish = iter;
      polish_gap *= 2;
      Vector xp = x, zp = z, yp = y;
      Residuals pres = res;
      if (polish(s, st, xp, zp, yp, pres)) {
        x = xp;
        z = zp;
        y = yp;
        return finish(Status::optimal, pres, iter, true);
      }
    }

    // Infeasibility certificates on the scaled iterate differences.
    const Vector dy = y - y_prev;
    const double dy_norm = inf_norm(s.E.cwiseProduct(dy));
    if (dy_norm > 1e-30) {
      const Vector Atdy = s.A.transpose() * dy;
      double support = 0.0;
      for (int i = 0; i < m; ++i) {
        if (dy[i] > 0.0) support += std::isfinite(s.u[i]) ? s.u[i] * dy[i] : kInf;
        else if (dy[i] < 0.0) support += std::isfinite(s.l[i]) ? s.l[i] * dy[i] : kInf;
      }
      if (inf_norm(s.D.cwiseInverse().cwiseProduct(Atdy)) <= st.eps_infeasible * dy_norm &&
          support < -st.eps_infeasible * dy_norm) {
        return finish(Status::primal_infeasible, res, iter, false);
      }
    }
    const Vector dx = x - x_prev;
    const double dx_norm = inf_norm(s.D.cwiseProduct(dx));
    if (dx_norm > 1e-30) {
      const double eps = st.eps_infeasible * dx_norm;
      bool unbounded = inf_norm(s.D.cwiseInverse().cwiseProduct(s.P * dx)) <= s.cost * eps &&
                       s.q.dot(dx) < -s.cost * eps;
      if (unbounded) {
        const Vector Adx = s.A * dx;
        for (int i = 0; i < m && unbounded; ++i) {
          const double v = Adx[i] / s.E[i];
          if (std::isfinite(s.u[i]) && v > eps) unbounded = false;
          if (std::isfinite(s.l[i]) && v < -eps) unbounded = false;
        }
      }
      if (unbounded) return finish(Status::dual_infeasible, res, iter, false);
    }

    if (st.adaptive_rho && checks % 5 == 0) {
      const Vector Ax = s.A * x;
      const double prim_norm = std::max(inf_norm(Ax), inf_norm(z));
      const double dual_norm = std::max({inf_norm(s.P * x), inf_norm(s.A.transpose() * y), inf_norm(s.q)});
      const double prim_s = inf_norm(Ax - z) / (prim_norm + 1e-30);
      const double dual_s = inf_norm(s.P * x + s.q + s.A.transpose() * y) / (dual_norm + 1e-30);
      const double ratio = std::sqrt(prim_s / (dual_s + 1e-30));
      const double candidate = std::clamp(rho_base * ratio, kRhoMin, kRhoMax);
      if (candidate > 5.0 * rho_base || candidate < 0.2 * rho_base) {
        rho_base = candidate;
        fill_rho(rho_base);
        kkt.update_rho(rho);
        if (!kkt.ok()) throw QpError("KKT refactorization failed");
      }
    }
  }

  Residuals pres = res;
  if (st.polish && polish(s, st, x, z, y, pres)) return finish(Status::optimal, pres, st.max_iter, true);
  return finish(Status::iteration_limit, res, st.max_iter, false);
}

void add_proximal_term(Problem& problem, double tau, const Vector& center) {
  const int n = problem.num_vars();
  SparseMatrix prox(n, n);
  prox.setIdentity();
  problem.Q = problem.Q + tau * prox;
  problem.c -= tau * center;
}

Solution solve_strongly_convex(const Problem& problem, double tau, const Vector& center,
                               const Settings& settings, const WarmStart* warm_start) {
  if (!(tau > 0.0)) throw QpError("proximal weight must be > 0");
  if (center.size() != problem.num_vars()) throw QpError("proximal center has the wrong size");
  Problem regularized = problem;
  add_proximal_term(regularized, tau, center);
  return solve_qp(regularized, settings, warm_start);
}

}  // namespace rec::qp
