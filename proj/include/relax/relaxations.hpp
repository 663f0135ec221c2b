// The relaxations studied by the experiments: the Goemans-Williamson SDP and
// its triangle-inequality tightening, the unique-games SDP (optionally with
// triangle cuts), Sherali-Adams levels over the metric polytope, the basic
// SDP/LP with consistency-violation penalty, and the Grothendieck cut-norm
// SDP. All built on the solvers in sdp.hpp / lp.hpp.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <stdexcept>
#include <string>
#include <vector>

#include "relax/csp.hpp"
#include "relax/graph.hpp"
#include "relax/lp.hpp"
#include "relax/rng.hpp"
#include "relax/sdp.hpp"
#include "relax/unique_game.hpp"

namespace relax {

// ---------------------------------------------------------------------------
// Max-cut SDPs

inline SdpProblem maxcut_sdp_problem(const NormalizedGraph& g) {
  SdpProblem p;
  p.dim = g.n();
  p.sense = Sense::Maximize;
  std::map<std::pair<int, int>, double> obj;
  for (const auto& e : g.edges()) {
    obj[{e.u, e.u}] += 0.25 * e.w;
    obj[{e.v, e.v}] += 0.25 * e.w;
    obj[{e.u, e.v}] -= 0.5 * e.w;
  }
  for (const auto& [ij, c] : obj) p.objective.add(ij.first, ij.second, c);
  for (int i = 0; i < g.n(); ++i) p.add_diag(i, 1.0);
  return p;
}

inline GramSolution gw_sdp(const NormalizedGraph& g, const SdpOptions& opts = {}) {
  return solve_sdp(maxcut_sdp_problem(g), opts);
}

namespace detail {

struct TriangleCut {
  SymLinExpr expr;
  double rhs;
  double violation;
};

// the four metric inequalities on an unordered triple of +-1-embeddable
// correlations: three centerings of X_ab + X_bc - X_ac <= 1 plus the
// perimeter bound X_ab + X_bc + X_ac >= -1
inline void maxcut_triangle_forms(int i, int j, int k, const Eigen::MatrixXd& x,
                                  std::vector<TriangleCut>& out, double min_violation) {
  const double xij = x(i, j), xjk = x(j, k), xik = x(i, k);
  const double vals[4] = {xij + xjk - xik, xij + xik - xjk, xjk + xik - xij,
                          -xij - xjk - xik};
  for (int f = 0; f < 4; ++f) {
    if (vals[f] - 1.0 <= min_violation) continue;
    TriangleCut cut;
    cut.rhs = 1.0;
    cut.violation = vals[f] - 1.0;
    double ci = f == 0 ? 1 : (f == 1 ? 1 : (f == 2 ? -1 : -1));
    double cj = f == 0 ? 1 : (f == 1 ? -1 : (f == 2 ? 1 : -1));
    double ck = f == 0 ? -1 : (f == 1 ? 1 : (f == 2 ? 1 : -1));
    cut.expr.add(i, j, ci);
    cut.expr.add(j, k, cj);
    cut.expr.add(i, k, ck);
    out.push_back(std::move(cut));
  }
}

}  // namespace detail

// GW SDP tightened with l2^2 triangle inequalities, managed by iterative
// separation: solve, add the most violated cuts, warm re-solve.
inline GramSolution sdp3(const NormalizedGraph& g, SdpOptions opts = {}) {
  if (g.n() > 200) throw std::invalid_argument("sdp3 cap is n <= 200");
  SdpProblem p = maxcut_sdp_problem(g);
  GramSolution sol = solve_sdp(p, opts);
  const int max_rounds = 40;
  const int per_round = 600;
  double prev_worst = std::numeric_limits<double>::infinity();
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<detail::TriangleCut> violated;
    for (int i = 0; i < g.n(); ++i)
      for (int j = i + 1; j < g.n(); ++j)
        for (int k = j + 1; k < g.n(); ++k)
          detail::maxcut_triangle_forms(i, j, k, sol.X, violated, 1.5 * opts.tol);
    if (violated.empty()) break;
    std::sort(violated.begin(), violated.end(),
              [](const auto& a, const auto& b) { return a.violation > b.violation; });
    if (violated.front().violation > 0.9 * prev_worst && round > 4) break;  // stalled
    prev_worst = violated.front().violation;
    if (static_cast<int>(violated.size()) > per_round) violated.resize(per_round);
    for (auto& cut : violated) p.add_cut(std::move(cut.expr), cut.rhs, CutSense::LE);
    SdpOptions warm = opts;
    warm.warm_start = &sol;
    GramSolution prev = std::move(sol);
    warm.warm_start = &prev;
    sol = solve_sdp(p, warm);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Unique-games SDP

inline SdpProblem ug_sdp_problem(const UniqueGame& game) {
  const int r = game.label_count();
  SdpProblem p;
  p.dim = game.n() * r;
  p.sense = Sense::Minimize;
  std::map<std::pair<int, int>, double> obj;
  for (const auto& c : game.constraints()) {
    for (int a = 0; a < r; ++a) {
      int ia = c.u * r + a;
      int jb = c.v * r + c.perm[a];
      obj[{ia, ia}] += c.w / r;
      obj[{jb, jb}] += c.w / r;
      obj[{std::min(ia, jb), std::max(ia, jb)}] -= 2.0 * c.w / r;
    }
  }
  for (const auto& [ij, coef] : obj) p.objective.add(ij.first, ij.second, coef);
  for (int v = 0; v < game.n(); ++v) {
    p.add_block(v * r, r);
    for (int a = 0; a < r; ++a)
      for (int b = a + 1; b < r; ++b) {
        SymLinExpr orth;
        orth.add(v * r + a, v * r + b, 1.0);
        p.add_cut(std::move(orth), 0.0, CutSense::EQ);
      }
  }
  return p;
}

namespace detail {

// l2^2 triangle inequality centered at q over points (p,q,r) of the
// label-vector cloud: X_pq + X_qr - X_pr - X_qq <= 0.
inline SymLinExpr point_triangle_expr(int p, int q, int r) {
  SymLinExpr e;
  e.add(p, q, 1.0);
  e.add(q, r, 1.0);
  e.add(p, r, -1.0);
  e.add(q, q, -1.0);
  return e;
}

inline double point_triangle_violation(const Eigen::MatrixXd& x, int p, int q, int r) {
  return x(p, q) + x(q, r) - x(p, r) - x(q, q);
}

// For R = 2 the label-difference vectors w_i = u_{i,0} - u_{i,1} are unit
// under the block constraints; their metric inequalities mirror the max-cut
// sdp3 cuts through the standard correspondence.
inline double diff_inner(const Eigen::MatrixXd& x, int r, int i, int j) {
  return x(i * r, j * r) - x(i * r, j * r + 1) - x(i * r + 1, j * r) + x(i * r + 1, j * r + 1);
}

inline SymLinExpr diff_triangle_expr(int r, int i, int j, int k, double si, double sj) {
  SymLinExpr e;
  auto add_pair = [&](int a, int b, double coef) {
    e.add(a * r, b * r, coef);
    e.add(a * r, b * r + 1, -coef);
    e.add(a * r + 1, b * r, -coef);
    e.add(a * r + 1, b * r + 1, coef);
  };
  add_pair(i, j, si);
  add_pair(j, k, sj);
  add_pair(i, k, -si * sj);
  return e;
}

}  // namespace detail

struct UgSdpResult {
  GramSolution sol;
  int separation_rounds = 0;
  double residual_cut_violation = 0.0;
};

// Unique-games SDP; with triangle_cuts it becomes the "sdp_3" instantiation:
// point triangle inequalities over (vertex,label) vectors, seeded with the
// label-matched triples of every edge plus 20*nR random triples, then up to
// 10 rounds of separation adding the 100 most violated cuts. For R = 2 the
// separation also covers the label-difference family, which is what ties the
// max-cut correspondence sdp3(G) = 1 - sdp3(game) together.
inline UgSdpResult ug_sdp_full(const UniqueGame& game, bool triangle_cuts,
                               SdpOptions opts = {}) {
  const int r = game.label_count();
  const int nr = game.n() * r;
  if (nr > 600) throw std::invalid_argument("unique game exceeds solver cap");
  SdpProblem p = ug_sdp_problem(game);
  UgSdpResult out;
  if (!triangle_cuts) {
    out.sol = solve_sdp(p, opts);
    return out;
  }
  // seed cuts
  std::vector<std::vector<int>> edge_clouds;
  for (const auto& c : game.constraints()) {
    std::vector<int> cloud;
    for (int a = 0; a < r; ++a) cloud.push_back(c.u * r + a);
    for (int a = 0; a < r; ++a) cloud.push_back(c.v * r + c.perm[a]);
    edge_clouds.push_back(std::move(cloud));
  }
  auto add_point_triple = [&](int a, int b, int c) {
    p.add_cut(detail::point_triangle_expr(a, b, c), 0.0, CutSense::LE);
    p.add_cut(detail::point_triangle_expr(b, a, c), 0.0, CutSense::LE);
    p.add_cut(detail::point_triangle_expr(a, c, b), 0.0, CutSense::LE);
  };
  std::set<std::tuple<int, int, int>> seeded;
  for (const auto& cloud : edge_clouds) {
    for (std::size_t x = 0; x < cloud.size(); ++x)
      for (std::size_t y = x + 1; y < cloud.size(); ++y)
        for (std::size_t z = y + 1; z < cloud.size(); ++z) {
          std::tuple<int, int, int> key{cloud[x], cloud[y], cloud[z]};
          if (seeded.insert(key).second) add_point_triple(cloud[x], cloud[y], cloud[z]);
        }
  }
  Rng rng(derive_seed(opts.seed, 0x7567));
  for (int t = 0; t < 20 * nr; ++t) {
    int a = static_cast<int>(rng.next_below(nr));
    int b = static_cast<int>(rng.next_below(nr));
    int c = static_cast<int>(rng.next_below(nr));
    if (a == b || b == c || a == c) continue;
    p.add_cut(detail::point_triangle_expr(a, b, c), 0.0, CutSense::LE);
  }
  out.sol = solve_sdp(p, opts);
  for (int round = 0; round < 10; ++round) {
    out.separation_rounds = round + 1;
    struct Cand {
      SymLinExpr expr;
      double rhs;
      double violation;
    };
    std::vector<Cand> cands;
    const Eigen::MatrixXd& x = out.sol.X;
    const double thresh = opts.tol;
    // point family (all centered triples; nR <= ~200 keeps this enumerable)
    for (int a = 0; a < nr; ++a)
      for (int b = a + 1; b < nr; ++b)
        for (int c = b + 1; c < nr; ++c) {
          double v1 = detail::point_triangle_violation(x, a, b, c);
          double v2 = detail::point_triangle_violation(x, b, a, c);
          double v3 = detail::point_triangle_violation(x, a, c, b);
          if (v1 > thresh) cands.push_back({detail::point_triangle_expr(a, b, c), 0.0, v1});
          if (v2 > thresh) cands.push_back({detail::point_triangle_expr(b, a, c), 0.0, v2});
          if (v3 > thresh) cands.push_back({detail::point_triangle_expr(a, c, b), 0.0, v3});
        }
    if (r == 2) {
      for (int i = 0; i < game.n(); ++i)
        for (int j = i + 1; j < game.n(); ++j)
          for (int k = j + 1; k < game.n(); ++k) {
            double dij = detail::diff_inner(x, r, i, j);
            double djk = detail::diff_inner(x, r, j, k);
            double dik = detail::diff_inner(x, r, i, k);
            const double signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
            for (const auto& s : signs) {
              double v = s[0] * dij + s[1] * djk - s[0] * s[1] * dik - 1.0;
              if (v > thresh)
                cands.push_back({detail::diff_triangle_expr(r, i, j, k, s[0], s[1]), 1.0, v});
            }
          }
    }
    if (cands.empty()) break;
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.violation > b.violation; });
    out.residual_cut_violation = cands.front().violation;
    if (static_cast<int>(cands.size()) > 100) cands.resize(100);
    for (auto& c : cands) p.add_cut(std::move(c.expr), c.rhs, CutSense::LE);
    GramSolution prev = std::move(out.sol);
    SdpOptions warm = opts;
    warm.warm_start = &prev;
    out.sol = solve_sdp(p, warm);
  }
  return out;
}

inline GramSolution ug_sdp(const UniqueGame& game, bool triangle_cuts = false,
                           SdpOptions opts = {}) {
  return ug_sdp_full(game, triangle_cuts, opts).sol;
}

// ---------------------------------------------------------------------------
// Sherali-Adams over the metric polytope (junta-distribution presentation
// projected to pair variables; sa_oracle_lift below keeps the explicit lift
// for cross-checks)

struct SaResult {
  double value = 0.0;
  Eigen::VectorXd x;  // one entry per unordered pair, row-major i<j
  int rounds = 0;
};

inline int pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

inline SaResult sherali_adams(const NormalizedGraph& g, int r) {
  if (r < 2 || r > 4) throw std::invalid_argument("sherali_adams supports r in {2,3,4}");
  const int n = g.n();
  if (r >= 3 && n > 30) throw std::invalid_argument("sherali_adams r>=3 cap is n <= 30");
  const int npairs = n * (n - 1) / 2;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(npairs);
  for (const auto& e : g.edges()) obj(pair_index(n, e.u, e.v)) += e.w;
  std::vector<LpRow> rows;
  for (const auto& e : g.edges()) rows.push_back({{{pair_index(n, e.u, e.v), 1.0}}, '<', 1.0});
  SaResult res;
  LpResult lp;
  for (int round = 0; round < 200; ++round) {
    res.rounds = round + 1;
    try {
      lp = solve_lp(npairs, obj, true, rows);
    } catch (const LpError& e) {
      throw std::logic_error(std::string("sherali_adams polytope solve failed: ") + e.what());
    }
    if (r == 2) break;  // no triple coupling at level 2
    // separation over every vertex triple: three triangle inequalities plus
    // the perimeter bound; also re-check pair upper bounds
    struct V {
      LpRow row;
      double viol;
    };
    std::vector<V> violated;
    const double sep_tol = 1e-7;  // safely above the simplex feasibility tolerance
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          int ij = pair_index(n, i, j), jk = pair_index(n, j, k), ik = pair_index(n, i, k);
          double xij = lp.x(ij), xjk = lp.x(jk), xik = lp.x(ik);
          double tri[3] = {xik - xij - xjk, xij - xjk - xik, xjk - xij - xik};
          int a[3] = {ik, ij, jk}, b[3] = {ij, jk, ij}, c[3] = {jk, ik, ik};
          for (int f = 0; f < 3; ++f)
            if (tri[f] > sep_tol)
              violated.push_back({{{{a[f], 1.0}, {b[f], -1.0}, {c[f], -1.0}}, '<', 0.0}, tri[f]});
          double per = xij + xjk + xik - 2.0;
          if (per > sep_tol)
            violated.push_back({{{{ij, 1.0}, {jk, 1.0}, {ik, 1.0}}, '<', 2.0}, per});
        }
    for (int pidx = 0; pidx < npairs; ++pidx)
      if (lp.x(pidx) > 1.0 + sep_tol)
        violated.push_back({{{{pidx, 1.0}}, '<', 1.0}, lp.x(pidx) - 1.0});
    if (violated.empty()) break;
    std::sort(violated.begin(), violated.end(), [](const V& u, const V& v) { return u.viol > v.viol; });
    if (violated.size() > 400) violated.resize(400);
    for (auto& v : violated) rows.push_back(std::move(v.row));
  }
  res.value = lp.value;
  res.x = lp.x;
  return res;
}

// Explicit folded lift used as the oracle for sherali_adams at tiny n:
// one distribution over the four cut configurations per vertex triple,
// consistent with shared pair variables.
inline double sa3_junta_lift_value(const NormalizedGraph& g) {
  const int n = g.n();
  const int npairs = n * (n - 1) / 2;
  // variables: x_pairs, then 4 per triple
  int ntriples = n * (n - 1) * (n - 2) / 6;
  int nvars = npairs + 4 * ntriples;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(nvars);
  for (const auto& e : g.edges()) obj(pair_index(n, e.u, e.v)) += e.w;
  std::vector<LpRow> rows;
  int t = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k, ++t) {
        int base = npairs + 4 * t;
        // classes: 0 = no split, 1 = i split, 2 = j split, 3 = k split
        rows.push_back({{{base, 1.0}, {base + 1, 1.0}, {base + 2, 1.0}, {base + 3, 1.0}}, '=', 1.0});
        rows.push_back({{{base + 1, 1.0}, {base + 2, 1.0}, {pair_index(n, i, j), -1.0}}, '=', 0.0});
        rows.push_back({{{base + 2, 1.0}, {base + 3, 1.0}, {pair_index(n, j, k), -1.0}}, '=', 0.0});
        rows.push_back({{{base + 1, 1.0}, {base + 3, 1.0}, {pair_index(n, i, k), -1.0}}, '=', 0.0});
      }
  return solve_lp(nvars, obj, true, rows).value;
}

// ---------------------------------------------------------------------------
// Grothendieck / cut-norm SDP

struct CutNormSdp {
  double value = 0.0;
  GramSolution sol;  // Gram of (u_1..u_n, v_1..v_m)
};

inline CutNormSdp cutnorm_sdp(const Eigen::MatrixXd& a, SdpOptions opts = {}) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  if (n + m > 300) throw std::invalid_argument("cutnorm_sdp cap exceeded");
  SdpProblem p;
  p.dim = n + m;
  p.sense = Sense::Maximize;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (a(i, j) != 0.0) p.objective.add(i, n + j, a(i, j));
  for (int i = 0; i < n + m; ++i) p.add_diag(i, 1.0);
  CutNormSdp res;
  res.sol = solve_sdp(p, opts);
  res.value = res.sol.value;
  return res;
}

// Exact infinity-to-one norm max_{x,y in {-1,1}} x^T A y by sign enumeration
// over x with the inner maximization solved coordinatewise.
inline double infty_to_one_norm(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  if (n > 20) throw std::invalid_argument("infty_to_one_norm brute-force cap is 20 rows");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < n; ++i) s += a.row(i);  // x = all ones
  auto score = [&]() { return s.cwiseAbs().sum(); };
  double best = score();
  std::vector<int> x(n, 1);
  const std::uint64_t total = 1ULL << (n - 1);  // x and -x give equal values
  for (std::uint64_t msk = 1; msk < total; ++msk) {
    const int i = std::countr_zero(msk);
    x[i] = -x[i];
    s += (2.0 * x[i]) * a.row(i).transpose();
    best = std::max(best, score());
  }
  return best;
}

// ---------------------------------------------------------------------------
// BasicSDP / BasicLP with violation penalty folded into the objective

struct BasicResult {
  double value = 0.0;         // payoff + penalty (penalty <= 0)
  double payoff_term = 0.0;
  double penalty_term = 0.0;
  Eigen::MatrixXd X;              // SDP only
  std::vector<Eigen::VectorXd> mu;  // local distribution per constraint
};

namespace detail {

// ordered (slot_i, slot_j, a, b) consistency terms of one constraint
struct PairTerm {
  int xi, xj;      // Gram indices (variable*q + label)
  double marginal; // filled per evaluation
};

inline void simplex_project(Eigen::VectorXd& v) {
  // Euclidean projection onto the probability simplex
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    cum += u(i);
    double cand = (cum - 1.0) / (i + 1);
    if (u(i) - cand > 0) theta = cand;
  }
  for (int i = 0; i < v.size(); ++i) v(i) = std::max(0.0, v(i) - theta);
}

}  // namespace detail

// BasicSDP: vectors v_{i,a} with per-variable bundles sum_a ||v_{i,a}||^2 = 1,
// local distributions mu_t over [q]^k, payoff (1/|P_total|) sum_t E_mu P_t,
// and the consistency violation sum |Pr_mu[x_i=a,x_j=b] - <v_ia,v_jb>| folded
// into the objective with weight 1/(eps*m). Alternating maximization: exact
// LP steps in mu, Burer-Monteiro augmented-Lagrangian steps in the vectors.
inline BasicResult basic_sdp_csp(const CspInstance& csp, double eps, SdpOptions opts = {});

// BasicLP: same payoff and local distributions, marginals tied to free
// per-variable distributions instead of vector inner products; one exact LP.
inline BasicResult basic_lp_csp(const CspInstance& csp, double eps);

// ---------------------------------------------------------------------------
// Dimension reduction with net snapping

struct DimReduceResult {
  Eigen::MatrixXd X;
  double value = 0.0;
  int dim = 0;
  int attempts = 0;
};

// Snap every coordinate to a grid of spacing (eps/4)/sqrt(dim) and clip into
// the unit ball; moves each point by at most eps/4, so inner products move by
// at most eps/2.
inline Eigen::MatrixXd snap_to_net(const Eigen::MatrixXd& vectors, double eps) {
  const double grid = (eps / 4.0) / std::sqrt(static_cast<double>(vectors.cols()));
  Eigen::MatrixXd out = vectors;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) out(i, j) = std::round(out(i, j) / grid) * grid;
    double norm = out.row(i).norm();
    if (norm > 1.0) out.row(i) /= norm;
  }
  return out;
}

inline DimReduceResult dimension_reduce(const Eigen::MatrixXd& x, const SymLinExpr& objective,
                                        double target_eps, std::uint64_t seed,
                                        int target_dim_override = 0) {
  const int dim = static_cast<int>(x.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  int d0 = 0;
  for (int i = 0; i < dim; ++i)
    if (es.eigenvalues()(i) > 1e-12) ++d0;
  Eigen::MatrixXd vecs(dim, std::max(d0, 1));
  vecs.setZero();
  int col = 0;
  for (int i = 0; i < dim; ++i)
    if (es.eigenvalues()(i) > 1e-12)
      vecs.col(col++) = es.eigenvectors().col(i) * std::sqrt(es.eigenvalues()(i));
  const double base_value = objective.eval(x);
  const int target =
      target_dim_override > 0
          ? target_dim_override
          : std::max(4, static_cast<int>(std::ceil(std::log(static_cast<double>(dim) + 1.0) /
                                                   (16.0 * target_eps * target_eps))));
  DimReduceResult best;
  best.value = std::numeric_limits<double>::quiet_NaN();
  if (d0 <= target && target_dim_override == 0) {
    best.X = x;
    best.value = base_value;
    best.dim = d0;
    best.attempts = 0;
    return best;
  }
  double best_err = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng(derive_seed(seed, 0xd1 + attempt));
    Eigen::MatrixXd proj(vecs.cols(), target);
    for (int i = 0; i < proj.rows(); ++i)
      for (int j = 0; j < proj.cols(); ++j)
        proj(i, j) = rng.next_gaussian() / std::sqrt(static_cast<double>(target));
    Eigen::MatrixXd reduced = snap_to_net(vecs * proj, target_eps);
    Eigen::MatrixXd xr = reduced * reduced.transpose();
    double err = std::abs(objective.eval(xr) - base_value);
    if (err < best_err) {
      best_err = err;
      best.X = xr;
      best.value = objective.eval(xr);
      best.dim = target;
      best.attempts = attempt + 1;
    }
    if (err <= target_eps) return best;
  }
  throw std::runtime_error("dimension_reduce: all retries exceeded target_eps (best " +
                           std::to_string(best_err) + ")");
}

// ---------------------------------------------------------------------------
// Relaxation identifiers (CLI strings)

enum class RelaxKind { Gw, Sdp3, Ug, Ug3, ShAd, BasicSdp, BasicLp, CutNorm, BruteForce };

struct RelaxationId {
  RelaxKind kind = RelaxKind::Gw;
  int r = 3;          // sherali-adams level
  double eps = 0.1;   // basic sdp/lp penalty scale

  static RelaxationId parse(const std::string& s) {
    RelaxationId id;
    if (s == "gw") id.kind = RelaxKind::Gw;
    else if (s == "sdp3") id.kind = RelaxKind::Sdp3;
    else if (s == "ug") id.kind = RelaxKind::Ug;
    else if (s == "ug3") id.kind = RelaxKind::Ug3;
    else if (s == "cutnorm") id.kind = RelaxKind::CutNorm;
    else if (s == "bf") id.kind = RelaxKind::BruteForce;
    else if (s.rfind("sa:", 0) == 0) {
      id.kind = RelaxKind::ShAd;
      id.r = std::stoi(s.substr(3));
    } else if (s.rfind("basicsdp:", 0) == 0) {
      id.kind = RelaxKind::BasicSdp;
      id.eps = std::stod(s.substr(9));
    } else if (s.rfind("basiclp:", 0) == 0) {
      id.kind = RelaxKind::BasicLp;
      id.eps = std::stod(s.substr(8));
    } else {
      throw std::invalid_argument("unknown relaxation id: " + s);
    }
    if (id.kind == RelaxKind::ShAd && (id.r < 2 || id.r > 4))
      throw std::invalid_argument("sa level must be 2..4");
    if ((id.kind == RelaxKind::BasicSdp || id.kind == RelaxKind::BasicLp) &&
        (id.eps <= 0.0 || id.eps > 1e9))
      throw std::invalid_argument("basic sdp/lp eps out of range");
    return id;
  }

  std::string str() const {
    switch (kind) {
      case RelaxKind::Gw: return "gw";
      case RelaxKind::Sdp3: return "sdp3";
      case RelaxKind::Ug: return "ug";
      case RelaxKind::Ug3: return "ug3";
      case RelaxKind::ShAd: return "sa:" + std::to_string(r);
      case RelaxKind::BasicSdp: return "basicsdp:" + std::to_string(eps);
      case RelaxKind::BasicLp: return "basiclp:" + std::to_string(eps);
      case RelaxKind::CutNorm: return "cutnorm";
      case RelaxKind::BruteForce: return "bf";
    }
    return "?";
  }
};

}  // namespace relax

#include "relax/detail/basic_relaxations.hpp"
