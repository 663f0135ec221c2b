// Dense two-phase revised simplex for desk-scale linear programs.
// Variables are nonnegative; upper bounds and general rows are expressed as
// explicit constraints. Returns optimal primal point and row duals.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace relax {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpError : std::runtime_error {
  LpError(LpStatus s, const std::string& what) : std::runtime_error(what), status(s) {}
  LpStatus status;
};

struct LpRow {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  char sense = '<';                           // '<', '=', '>'
  double rhs = 0.0;
};

struct LpResult {
  double value = 0.0;
  Eigen::VectorXd x;      // primal point, one entry per variable
  Eigen::VectorXd duals;  // one entry per input row
  int iterations = 0;
};

namespace detail {

struct SimplexState {
  std::vector<int> basis;
  std::vector<char> in_basis;
  Eigen::MatrixXd binv;
  Eigen::VectorXd xb;
};

inline constexpr double kLpTol = 1e-9;

// One simplex phase on min costs.x over Ax=b, x>=0 starting from `st`.
// `allowed[j]` == 0 bars column j from entering. Returns iteration-limit flag.
inline bool simplex_phase(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& costs, const std::vector<char>& allowed,
                          SimplexState& st, int max_iter, int& iters, bool* unbounded) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  *unbounded = false;
  int degenerate_streak = 0;
  for (int it = 0; it < max_iter; ++it, ++iters) {
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = costs(st.basis[i]);
    Eigen::VectorXd y = st.binv.transpose() * cb;
    Eigen::VectorXd reduced = costs - a.transpose() * y;
    const bool bland = degenerate_streak > 300;
    int enter = -1;
    double best = -kLpTol;
    for (int j = 0; j < n; ++j) {
      if (!allowed[j] || st.in_basis[j]) continue;
      if (reduced(j) < (bland ? -kLpTol : best)) {
        enter = j;
        if (bland) break;
        best = reduced(j);
      }
    }
    if (enter < 0) return true;  // optimal
    Eigen::VectorXd w = st.binv * a.col(enter);
    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (w(i) > kLpTol) {
        double ratio = st.xb(i) / w(i);
        if (leave < 0 || ratio < best_ratio - kLpTol ||
            (ratio < best_ratio + kLpTol && st.basis[i] < st.basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) { *unbounded = true; return true; }
    degenerate_streak = best_ratio < kLpTol ? degenerate_streak + 1 : 0;
    const double piv = w(leave);
    st.xb -= best_ratio * w;
    st.xb(leave) = best_ratio;
    for (int i = 0; i < m; ++i) st.xb(i) = std::max(st.xb(i), 0.0);
    Eigen::RowVectorXd brow = st.binv.row(leave) / piv;
    for (int i = 0; i < m; ++i)
      if (i != leave && std::abs(w(i)) > 1e-14) st.binv.row(i) -= w(i) * brow;
    st.binv.row(leave) = brow;
    st.in_basis[st.basis[leave]] = 0;
    st.basis[leave] = enter;
    st.in_basis[enter] = 1;
    if ((it & 0x3ff) == 0x3ff) {  // periodic refactorization against drift
      Eigen::MatrixXd bmat(m, m);
      for (int i = 0; i < m; ++i) bmat.col(i) = a.col(st.basis[i]);
      st.binv = bmat.partialPivLu().inverse();
      st.xb = st.binv * b;
      for (int i = 0; i < m; ++i) st.xb(i) = std::max(st.xb(i), 0.0);
    }
  }
  return false;
}

}  // namespace detail

// Solves max/min objective.x subject to rows and x >= 0.
inline LpResult solve_lp(int nvars, const Eigen::VectorXd& objective, bool maximize,
                         const std::vector<LpRow>& rows, int max_iter = 500000) {
  const int m = static_cast<int>(rows.size());
  std::vector<double> row_sign(m, 1.0);
  int extra = 0;
  for (const auto& r : rows)
    if (r.sense != '=') ++extra;
  const int n_struct = nvars + extra;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n_struct + m);
  Eigen::VectorXd b(m);
  std::vector<int> basis(m, -1);
  int slack_col = nvars;
  int n_total = n_struct;
  for (int i = 0; i < m; ++i) {
    double sign = 1.0;
    char sense = rows[i].sense;
    double rhs = rows[i].rhs;
    if (rhs < 0.0) {
      sign = -1.0;
      rhs = -rhs;
      sense = sense == '<' ? '>' : (sense == '>' ? '<' : '=');
    }
    row_sign[i] = sign;
    for (const auto& [j, coef] : rows[i].terms) {
      if (j < 0 || j >= nvars) throw std::invalid_argument("lp row references unknown variable");
      a(i, j) += sign * coef;
    }
    b(i) = rhs;
    if (sense == '<') {
      a(i, slack_col) = 1.0;
      basis[i] = slack_col++;
    } else if (sense == '>') {
      a(i, slack_col) = -1.0;
      ++slack_col;
    }
  }
  const int first_artificial = n_total;
  for (int i = 0; i < m; ++i) {
    if (basis[i] < 0) {
      a(i, n_total) = 1.0;
      basis[i] = n_total++;
    }
  }
  a.conservativeResize(m, n_total);

  detail::SimplexState st;
  st.basis = basis;
  st.in_basis.assign(n_total, 0);
  for (int idx : basis) st.in_basis[idx] = 1;
  st.binv = Eigen::MatrixXd::Identity(m, m);
  st.xb = b;

  std::vector<char> allowed(n_total, 1);
  int iters = 0;
  bool unbounded = false;
  if (n_total > first_artificial) {
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n_total);
    for (int j = first_artificial; j < n_total; ++j) cost1(j) = 1.0;
    if (!detail::simplex_phase(a, b, cost1, allowed, st, max_iter, iters, &unbounded))
      throw LpError(LpStatus::IterationLimit, "lp phase 1 iteration limit");
    double art = 0.0;
    for (int i = 0; i < m; ++i)
      if (st.basis[i] >= first_artificial) art += st.xb(i);
    if (art > 1e-7) throw LpError(LpStatus::Infeasible, "lp infeasible");
  }
  for (int j = first_artificial; j < n_total; ++j) allowed[j] = 0;
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n_total);
  for (int j = 0; j < nvars; ++j) cost2(j) = maximize ? -objective(j) : objective(j);
  if (!detail::simplex_phase(a, b, cost2, allowed, st, max_iter, iters, &unbounded))
    throw LpError(LpStatus::IterationLimit, "lp phase 2 iteration limit");
  if (unbounded) throw LpError(LpStatus::Unbounded, "lp unbounded");

  LpResult res;
  res.iterations = iters;
  res.x = Eigen::VectorXd::Zero(nvars);
  for (int i = 0; i < m; ++i)
    if (st.basis[i] < nvars) res.x(st.basis[i]) = st.xb(i);
  double val = 0.0;
  for (int j = 0; j < nvars; ++j) val += objective(j) * res.x(j);
  res.value = val;
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) cb(i) = cost2(st.basis[i]);
  Eigen::VectorXd y = st.binv.transpose() * cb;
  res.duals = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i)
    res.duals(i) = (maximize ? -1.0 : 1.0) * row_sign[i] * y(i);
  return res;
}

}  // namespace relax
