// PSD-constrained optimizer for all SDP relaxations in this project.
//
// Algorithm: augmented Lagrangian over a low-rank factorization X = Y Y^T
// with rank min(dim, ceil(sqrt(2 * #constraints)) + 2), L-BFGS inner solves,
// 5 seeded restarts, and a rigorous dual bound from the eigenvalue shift of
// the dual slack matrix. Desk scale: dim <= 600.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "relax/rng.hpp"

namespace relax {

enum class Sense { Maximize, Minimize };
enum class CutSense { LE, GE, EQ };

// Symmetric linear functional of X. Each (i,j,c) entry with i <= j
// contributes c * X(i,j); unordered pairs are listed once.
struct SymLinExpr {
  std::vector<std::tuple<int, int, double>> entries;

  void add(int i, int j, double c) {
    if (i > j) std::swap(i, j);
    entries.push_back({i, j, c});
  }

  double eval_gram(const Eigen::MatrixXd& y) const {
    double s = 0.0;
    for (const auto& [i, j, c] : entries) s += c * y.row(i).dot(y.row(j));
    return s;
  }

  double eval(const Eigen::MatrixXd& x) const {
    double s = 0.0;
    for (const auto& [i, j, c] : entries) s += c * x(i, j);
    return s;
  }

  // grad += scale * d(expr(YY^T))/dY
  void add_grad(const Eigen::MatrixXd& y, double scale, Eigen::MatrixXd& grad) const {
    for (const auto& [i, j, c] : entries) {
      if (i == j) {
        grad.row(i) += (2.0 * scale * c) * y.row(i);
      } else {
        grad.row(i) += (scale * c) * y.row(j);
        grad.row(j) += (scale * c) * y.row(i);
      }
    }
  }

  void add_to_matrix(double scale, Eigen::MatrixXd& m) const {
    for (const auto& [i, j, c] : entries) {
      if (i == j) {
        m(i, i) += scale * c;
      } else {
        m(i, j) += 0.5 * scale * c;
        m(j, i) += 0.5 * scale * c;
      }
    }
  }
};

struct LinearCut {
  SymLinExpr expr;
  double rhs = 0.0;
  CutSense sense = CutSense::LE;
};

struct SdpProblem {
  int dim = 0;
  Sense sense = Sense::Maximize;
  SymLinExpr objective;
  std::vector<std::pair<int, double>> diag_constraints;       // X_ii = value
  std::vector<std::pair<int, int>> block_structure;           // (first index, label count)
  std::vector<LinearCut> linear_cuts;

  void add_diag(int i, double v) { diag_constraints.push_back({i, v}); }
  // Unique-games bundle: trace of the block starting at `first` is 1.
  void add_block(int first, int labels) { block_structure.push_back({first, labels}); }
  void add_cut(SymLinExpr e, double rhs, CutSense s) { linear_cuts.push_back({std::move(e), rhs, s}); }
};

struct GramSolution {
  Eigen::MatrixXd X;
  double value = 0.0;            // objective value in the problem's sense
  double primal_residual = 0.0;  // max equality violation
  double psd_violation = 0.0;    // max(0, -lambda_min(X)); ~0 by construction
  double cut_violation = 0.0;    // max violation over linear cuts
  long iterations = 0;           // inner gradient iterations
  int outer_rounds = 0;
  bool converged = false;
  double certified_bound = 0.0;  // upper bound for max problems, lower for min
  double certified_gap = 0.0;
  Eigen::VectorXd eq_multipliers;    // solver state, reusable for warm restarts
  Eigen::VectorXd ineq_multipliers;
};

struct SdpOptions {
  double tol = 1e-6;
  long max_inner_iterations = 50000;
  int max_outer_rounds = 80;
  int restarts = 5;
  int rank_override = 0;
  std::uint64_t seed = 0;
  const GramSolution* warm_start = nullptr;
};

struct SdpError : std::runtime_error {
  SdpError(const std::string& what, GramSolution best_iterate)
      : std::runtime_error(what), best(std::move(best_iterate)) {}
  GramSolution best;
};

inline std::pair<double, Eigen::VectorXd> min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("min_eigenvalue needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

namespace detail {

struct CanonicalSdp {
  int dim = 0;
  double sense_sign = 1.0;  // internal objective = sense_sign * objective, maximized
  SymLinExpr objective;
  std::vector<SymLinExpr> eq;
  std::vector<double> eq_rhs;
  std::vector<SymLinExpr> ineq;  // expr <= rhs
  std::vector<double> ineq_rhs;
  double trace_cap = 0.0;
  bool trace_covered = true;

  static CanonicalSdp build(const SdpProblem& p) {
    CanonicalSdp c;
    c.dim = p.dim;
    c.sense_sign = p.sense == Sense::Maximize ? 1.0 : -1.0;
    c.objective = p.objective;
    std::vector<char> covered(p.dim, 0);
    for (const auto& [i, v] : p.diag_constraints) {
      SymLinExpr e;
      e.add(i, i, 1.0);
      c.eq.push_back(std::move(e));
      c.eq_rhs.push_back(v);
      c.trace_cap += v;
      covered[i] = 1;
    }
    for (const auto& [first, labels] : p.block_structure) {
      SymLinExpr tr;
      for (int a = 0; a < labels; ++a) {
        tr.add(first + a, first + a, 1.0);
        covered[first + a] = 1;
      }
      c.eq.push_back(std::move(tr));
      c.eq_rhs.push_back(1.0);
      c.trace_cap += 1.0;
    }
    for (const auto& cut : p.linear_cuts) {
      switch (cut.sense) {
        case CutSense::EQ:
          c.eq.push_back(cut.expr);
          c.eq_rhs.push_back(cut.rhs);
          break;
        case CutSense::LE:
          c.ineq.push_back(cut.expr);
          c.ineq_rhs.push_back(cut.rhs);
          break;
        case CutSense::GE: {
          SymLinExpr neg = cut.expr;
          for (auto& [i, j, coef] : neg.entries) coef = -coef;
          c.ineq.push_back(std::move(neg));
          c.ineq_rhs.push_back(-cut.rhs);
          break;
        }
      }
    }
    for (char f : covered)
      if (!f) c.trace_covered = false;
    return c;
  }
};

class BurerMonteiro {
 public:
  BurerMonteiro(const CanonicalSdp& prob, const SdpOptions& opts) : p_(prob), o_(opts) {}

  struct RunResult {
    Eigen::MatrixXd y;
    Eigen::VectorXd lam, mu;
    double max_viol = 0.0;
    double objective = 0.0;  // internal (maximized) objective
    long inner_iters = 0;
    int outer_rounds = 0;
  };

  RunResult run(const Eigen::MatrixXd& y0, Eigen::VectorXd lam, Eigen::VectorXd mu) {
    RunResult r;
    r.y = y0;
    r.lam = std::move(lam);
    r.mu = std::move(mu);
    double rho = 1.0;
    double prev_viol = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < o_.max_outer_rounds; ++outer) {
      r.outer_rounds = outer + 1;
      long budget = o_.max_inner_iterations - r.inner_iters;
      if (budget <= 0) break;
      r.inner_iters += lbfgs(r.y, r.lam, r.mu, rho, std::min<long>(budget, 600));
      auto [eqv, inv] = violations(r.y);
      double maxviol = 0.0;
      for (double g : eqv) maxviol = std::max(maxviol, std::abs(g));
      for (double h : inv) maxviol = std::max(maxviol, std::max(0.0, h));
      r.max_viol = maxviol;
      if (maxviol <= o_.tol && outer >= 1) break;
      for (std::size_t i = 0; i < eqv.size(); ++i) r.lam(i) += rho * eqv[i];
      for (std::size_t j = 0; j < inv.size(); ++j) r.mu(j) = std::max(0.0, r.mu(j) + rho * inv[j]);
      if (maxviol > 0.3 * prev_viol) rho = std::min(rho * 4.0, 1e9);
      prev_viol = maxviol;
    }
    r.objective = p_.objective.eval_gram(r.y) * p_.sense_sign;
    return r;
  }

  std::pair<std::vector<double>, std::vector<double>> violations(const Eigen::MatrixXd& y) const {
    std::vector<double> eqv(p_.eq.size()), inv(p_.ineq.size());
    for (std::size_t i = 0; i < p_.eq.size(); ++i) eqv[i] = p_.eq[i].eval_gram(y) - p_.eq_rhs[i];
    for (std::size_t j = 0; j < p_.ineq.size(); ++j) inv[j] = p_.ineq[j].eval_gram(y) - p_.ineq_rhs[j];
    return {eqv, inv};
  }

 private:
  double value_only(const Eigen::MatrixXd& y, const Eigen::VectorXd& lam, const Eigen::VectorXd& mu,
                    double rho) const {
    double f = -p_.sense_sign * p_.objective.eval_gram(y);
    for (std::size_t i = 0; i < p_.eq.size(); ++i) {
      double g = p_.eq[i].eval_gram(y) - p_.eq_rhs[i];
      f += lam(i) * g + 0.5 * rho * g * g;
    }
    for (std::size_t j = 0; j < p_.ineq.size(); ++j) {
      double h = p_.ineq[j].eval_gram(y) - p_.ineq_rhs[j];
      double t = std::max(0.0, mu(j) + rho * h);
      f += (t * t - mu(j) * mu(j)) / (2.0 * rho);
    }
    return f;
  }

  double value_and_grad(const Eigen::MatrixXd& y, const Eigen::VectorXd& lam,
                        const Eigen::VectorXd& mu, double rho, Eigen::MatrixXd& grad) const {
    grad.setZero();
    double f = -p_.sense_sign * p_.objective.eval_gram(y);
    p_.objective.add_grad(y, -p_.sense_sign, grad);
    for (std::size_t i = 0; i < p_.eq.size(); ++i) {
      double g = p_.eq[i].eval_gram(y) - p_.eq_rhs[i];
      f += lam(i) * g + 0.5 * rho * g * g;
      p_.eq[i].add_grad(y, lam(i) + rho * g, grad);
    }
    for (std::size_t j = 0; j < p_.ineq.size(); ++j) {
      double h = p_.ineq[j].eval_gram(y) - p_.ineq_rhs[j];
      double t = std::max(0.0, mu(j) + rho * h);
      f += (t * t - mu(j) * mu(j)) / (2.0 * rho);
      if (t > 0.0) p_.ineq[j].add_grad(y, t, grad);
    }
    return f;
  }

  // Standard two-loop L-BFGS with Armijo backtracking. Returns evals used.
  long lbfgs(Eigen::MatrixXd& y, const Eigen::VectorXd& lam, const Eigen::VectorXd& mu, double rho,
             long max_iters) const {
    const int rows = static_cast<int>(y.rows());
    const int cols = static_cast<int>(y.cols());
    const int nn = rows * cols;
    auto flat = [&](const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), nn); };
    Eigen::MatrixXd grad(rows, cols), grad_new(rows, cols);
    double f = value_and_grad(y, lam, mu, rho, grad);
    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)
    long used = 0;
    for (long it = 0; it < max_iters; ++it, ++used) {
      double gnorm = grad.norm();
      if (gnorm <= 1e-9 * (1.0 + std::abs(f)) || gnorm <= 0.05 * o_.tol) break;
      // two-loop recursion
      Eigen::VectorXd q = flat(grad);
      std::vector<double> alpha(history.size());
      for (int h = static_cast<int>(history.size()) - 1; h >= 0; --h) {
        const auto& [s, yv] = history[h];
        double rho_h = 1.0 / s.dot(yv);
        alpha[h] = rho_h * s.dot(q);
        q -= alpha[h] * yv;
      }
      if (!history.empty()) {
        const auto& [s, yv] = history.back();
        q *= s.dot(yv) / yv.dot(yv);
      }
      for (std::size_t h = 0; h < history.size(); ++h) {
        const auto& [s, yv] = history[h];
        double rho_h = 1.0 / s.dot(yv);
        double beta = rho_h * yv.dot(q);
        q += (alpha[h] - beta) * s;
      }
      Eigen::Map<Eigen::MatrixXd> dir(q.data(), rows, cols);
      double descent = -grad.cwiseProduct(dir).sum();
      if (descent >= 0.0) {  // not a descent direction; reset to steepest
        dir = grad;
        descent = -grad.squaredNorm();
        history.clear();
      }
      double step = 1.0;
      Eigen::MatrixXd y_new;
      double f_new = f;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        y_new = y - step * dir;
        f_new = value_only(y_new, lam, mu, rho);
        if (f_new <= f + 1e-4 * step * descent) { accepted = true; break; }
        step *= 0.5;
      }
      if (!accepted) break;
      f_new = value_and_grad(y_new, lam, mu, rho, grad_new);
      Eigen::VectorXd s_vec = flat(y_new) - flat(y);
      Eigen::VectorXd y_vec = flat(grad_new) - flat(grad);
      if (s_vec.dot(y_vec) > 1e-12 * s_vec.norm() * y_vec.norm()) {
        history.push_back({s_vec, y_vec});
        if (history.size() > 8) history.pop_front();
      }
      y = std::move(y_new);
      grad = grad_new;
      f = f_new;
    }
    return used;
  }

  const CanonicalSdp& p_;
  const SdpOptions& o_;
};

}  // namespace detail

inline GramSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opts = {}) {
  if (problem.dim <= 0 || problem.dim > 600)
    throw std::invalid_argument("sdp dimension out of range (cap 600)");
  if (opts.tol <= 0.0) throw std::invalid_argument("tol must be positive");
  auto canon = detail::CanonicalSdp::build(problem);
  const std::size_t m_total = canon.eq.size() + canon.ineq.size();
  int rank = opts.rank_override > 0
                 ? opts.rank_override
                 : std::min<int>(problem.dim,
                                 static_cast<int>(std::ceil(std::sqrt(2.0 * (m_total + 1)))) + 2);
  detail::BurerMonteiro bm(canon, opts);

  detail::BurerMonteiro::RunResult best;
  bool have_best = false;
  long total_inner = 0;
  int total_outer = 0;
  const int restarts = opts.warm_start ? 1 : std::max(1, opts.restarts);
  for (int rs = 0; rs < restarts; ++rs) {
    Eigen::MatrixXd y0(problem.dim, rank);
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(canon.eq.size());
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(canon.ineq.size());
    if (opts.warm_start) {
      // spectral factorization of the provided X, truncated to `rank`
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(opts.warm_start->X);
      y0.setZero();
      const int d = problem.dim;
      for (int k = 0; k < std::min(rank, d); ++k) {
        double ev = es.eigenvalues()(d - 1 - k);
        if (ev <= 0.0) break;
        y0.col(k) = es.eigenvectors().col(d - 1 - k) * std::sqrt(ev);
      }
      if (opts.warm_start->eq_multipliers.size() == lam.size()) lam = opts.warm_start->eq_multipliers;
      if (opts.warm_start->ineq_multipliers.size() == mu.size()) mu = opts.warm_start->ineq_multipliers;
    } else {
      Rng rng(derive_seed(opts.seed, 0x5d90 + rs));
      for (int i = 0; i < y0.rows(); ++i)
        for (int j = 0; j < y0.cols(); ++j) y0(i, j) = 0.3 * rng.next_gaussian();
    }
    auto run = bm.run(y0, std::move(lam), std::move(mu));
    total_inner += run.inner_iters;
    total_outer += run.outer_rounds;
    bool run_feasible = run.max_viol <= opts.tol;
    bool best_feasible = have_best && best.max_viol <= opts.tol;
    bool better = !have_best ||
                  (run_feasible && !best_feasible) ||
                  (run_feasible && best_feasible && run.objective > best.objective + 1e-12) ||
                  (!run_feasible && !best_feasible && run.max_viol < best.max_viol);
    if (better) { best = run; have_best = true; }
  }

  GramSolution sol;
  sol.X = best.y * best.y.transpose();
  sol.iterations = total_inner;
  sol.outer_rounds = best.outer_rounds;
  sol.eq_multipliers = best.lam;
  sol.ineq_multipliers = best.mu;
  double raw = problem.objective.eval(sol.X);
  sol.value = raw;

  auto [eqv, inv] = bm.violations(best.y);
  double eq_res = 0.0;
  for (double g : eqv) eq_res = std::max(eq_res, std::abs(g));
  sol.primal_residual = eq_res;
  double cut_res = 0.0;
  // cut_violation reported over the original linear_cuts only
  for (const auto& cut : problem.linear_cuts) {
    double v = cut.expr.eval(sol.X) - cut.rhs;
    switch (cut.sense) {
      case CutSense::LE: cut_res = std::max(cut_res, v); break;
      case CutSense::GE: cut_res = std::max(cut_res, -v); break;
      case CutSense::EQ: cut_res = std::max(cut_res, std::abs(v)); break;
    }
  }
  sol.cut_violation = cut_res;
  sol.psd_violation = std::max(0.0, -min_eigenvalue(sol.X).first);

  // Dual certificate via eigenvalue shift of the slack matrix S.
  {
    Eigen::MatrixXd s_mat = Eigen::MatrixXd::Zero(problem.dim, problem.dim);
    canon.objective.add_to_matrix(-canon.sense_sign, s_mat);
    for (std::size_t i = 0; i < canon.eq.size(); ++i) canon.eq[i].add_to_matrix(best.lam(i), s_mat);
    for (std::size_t j = 0; j < canon.ineq.size(); ++j)
      canon.ineq[j].add_to_matrix(best.mu(j), s_mat);
    auto [smin, svec] = min_eigenvalue(s_mat);
    double shift = std::max(0.0, -smin);
    double trace_cap = canon.trace_covered ? canon.trace_cap : sol.X.trace() + 1.0;
    double margin = 0.0;
    for (std::size_t i = 0; i < canon.eq.size(); ++i) margin += std::abs(best.lam(i) * eqv[i]);
    for (std::size_t j = 0; j < canon.ineq.size(); ++j) margin += best.mu(j) * std::max(0.0, inv[j]);
    double bound_internal = 0.0;
    for (std::size_t i = 0; i < canon.eq.size(); ++i) bound_internal += best.lam(i) * canon.eq_rhs[i];
    for (std::size_t j = 0; j < canon.ineq.size(); ++j) bound_internal += best.mu(j) * canon.ineq_rhs[j];
    bound_internal += shift * std::max(trace_cap, sol.X.trace()) + margin;
    sol.certified_bound = canon.sense_sign > 0 ? bound_internal : -bound_internal;
    sol.certified_gap = std::abs(bound_internal - canon.sense_sign * raw);
  }

  sol.converged = best.max_viol <= opts.tol;
  if (!sol.converged) {
    throw SdpError("sdp solver did not reach feasibility tolerance (residual " +
                       std::to_string(best.max_viol) + ")",
                   sol);
  }
  return sol;
}

}  // namespace relax
