// Third-power proxy games, the tilde edge distribution and its comparison to
// the subsampled third power, the decoding operator for sample solutions, and
// the proxy-domination checks.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "relax/relaxations.hpp"
#include "relax/rng.hpp"
#include "relax/subsample.hpp"
#include "relax/unique_game.hpp"

namespace relax {

// Weighted directed neighbor view of a unique game: for each vertex the list
// of (neighbor, edge weight, permutation oriented away from the vertex).
struct GameAdjacency {
  struct Arc {
    int to;
    double w;
    std::vector<int> perm;  // labels at `from` -> labels at `to`
  };
  std::vector<std::vector<Arc>> arcs;

  explicit GameAdjacency(const UniqueGame& game) : arcs(game.n()) {
    for (const auto& c : game.constraints()) {
      arcs[c.u].push_back({c.v, c.w, c.perm});
      arcs[c.v].push_back({c.u, c.w, inverse_perm(c.perm)});
    }
  }
};

// One constraint of G^3 per length-3 walk (u,u',v',v) with u != v, weight
// proportional to the product of the three edge weights, permutations
// composed along the walk. Parallel walks with equal composition aggregate;
// differing compositions stay as separate weighted constraints.
inline UniqueGame third_power(const UniqueGame& game) {
  GameAdjacency adj(game);
  const int r = game.label_count();
  std::map<std::pair<std::pair<int, int>, std::vector<int>>, double> acc;
  for (const auto& mid : game.constraints()) {
    // both orientations of the middle edge
    for (int orient = 0; orient < 2; ++orient) {
      const int i = orient == 0 ? mid.u : mid.v;
      const int j = orient == 0 ? mid.v : mid.u;
      const std::vector<int>& pm = orient == 0 ? mid.perm : inverse_perm(mid.perm);
      for (const auto& ai : adj.arcs[i]) {    // u -> i arc is reverse of i -> u
        for (const auto& aj : adj.arcs[j]) {  // j -> v
          const int u = ai.to, v = aj.to;
          if (u == v) continue;  // no self-loop constraints
          // pi_{v<-u} = pi_{v<-j} o pi_{j<-i} o pi_{i<-u}
          std::vector<int> comp = compose_perm(aj.perm, compose_perm(pm, inverse_perm(ai.perm)));
          double w = ai.w * mid.w * aj.w;
          if (u <= v)
            acc[{{u, v}, comp}] += w;
          else
            acc[{{v, u}, inverse_perm(comp)}] += w;
        }
      }
    }
  }
  if (acc.empty()) throw std::runtime_error("third_power: no length-3 walks");
  double total = 0.0;
  for (const auto& [k, w] : acc) total += w;
  std::vector<UgConstraint> cs;
  cs.reserve(acc.size());
  for (const auto& [k, w] : acc) cs.push_back({k.first.first, k.first.second, w / total, k.second});
  return UniqueGame(game.n(), r, std::move(cs));
}

// ---------------------------------------------------------------------------
// Edge distributions and the tilde game

// Probability distribution over unordered vertex pairs (self-pairs allowed
// for distributions arising from the tilde construction).
using EdgeDistribution = std::map<std::pair<int, int>, double>;

inline double tv_distance(const EdgeDistribution& p, const EdgeDistribution& q) {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) s += v;
  return 0.5 * s;
}

inline EdgeDistribution game_edge_distribution(const UniqueGame& game) {
  EdgeDistribution d;
  for (const auto& c : game.constraints()) d[{c.u, c.v}] += c.w;
  return d;
}

// Edge distribution of G^3 restricted to pairs inside W, re-normalized
// (weighted by walk multiplicity, the D1 of the comparison).
inline EdgeDistribution third_power_restricted_distribution(const UniqueGame& cube,
                                                            const std::vector<int>& w_set) {
  std::vector<char> in_w(cube.n(), 0);
  for (int v : w_set) in_w[v] = 1;
  EdgeDistribution d;
  double total = 0.0;
  for (const auto& c : cube.constraints())
    if (in_w[c.u] && in_w[c.v]) {
      d[{c.u, c.v}] += c.w;
      total += c.w;
    }
  for (auto& [k, v] : d) v /= total;
  return d;
}

struct TildeEntry {
  int u, v;  // sample vertices (u <= v not enforced; oriented u -> v)
  double w;
  std::vector<int> perm;
};

// The closed-form tilde distribution: sample a base edge (i,j), then u and v
// uniformly from the W-neighborhoods of i and j (uniform over all of W when a
// neighborhood is empty, with the identity standing in for the missing arc
// permutation). Mass w/(|N_W(i)|*|N_W(j)|) per (u,v) pair; permutations
// composed as in the third power. fallback_count reports how many base-edge
// endpoints had no W-neighbor.
struct TildeGame {
  std::vector<TildeEntry> entries;  // self-pairs kept: the decoding identity
                                    // averages over them exactly
  int fallback_count = 0;

  double self_mass() const {
    double s = 0.0;
    for (const auto& e : entries)
      if (e.u == e.v) s += e.w;
    return s;
  }

  // Distribution over proper pairs (self-pairs dropped, renormalized), the
  // object compared against the third-power edge distribution.
  EdgeDistribution distribution() const {
    EdgeDistribution d;
    double total = 0.0;
    for (const auto& e : entries) {
      if (e.u == e.v) continue;
      d[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.w;
      total += e.w;
    }
    for (auto& [k, v] : d) v /= total;
    return d;
  }
};

inline TildeGame tilde_game(const UniqueGame& game, const std::vector<int>& w_set) {
  if (w_set.empty()) throw std::invalid_argument("tilde_game needs a nonempty W");
  GameAdjacency adj(game);
  const int r = game.label_count();
  std::vector<char> in_w(game.n(), 0);
  for (int v : w_set) in_w[v] = 1;
  std::vector<int> idperm(r);
  for (int a = 0; a < r; ++a) idperm[a] = a;

  // W-neighbor arcs per vertex, with the uniform-over-W identity fallback
  std::vector<std::vector<GameAdjacency::Arc>> wn(game.n());
  TildeGame out;
  for (int i = 0; i < game.n(); ++i) {
    for (const auto& a : adj.arcs[i])
      if (in_w[a.to]) wn[i].push_back(a);
    if (wn[i].empty()) {
      ++out.fallback_count;
      for (int v : w_set) wn[i].push_back({v, 0.0, idperm});
    }
  }
  // both orientations of each base edge carry half the edge mass, so that on
  // regular graphs with W = V the distribution coincides with the third power
  std::map<std::pair<std::pair<int, int>, std::vector<int>>, double> acc;
  for (const auto& mid : game.constraints()) {
    for (int orient = 0; orient < 2; ++orient) {
      const int i = orient == 0 ? mid.u : mid.v;
      const int j = orient == 0 ? mid.v : mid.u;
      const std::vector<int> pm = orient == 0 ? mid.perm : inverse_perm(mid.perm);
      const double share = 0.5 * mid.w / (static_cast<double>(wn[i].size()) * wn[j].size());
      for (const auto& ai : wn[i])
        for (const auto& aj : wn[j]) {
          // pi_{v<-u} along (u, i, j, v) with u = ai.to, v = aj.to
          std::vector<int> comp =
              compose_perm(aj.perm, compose_perm(pm, inverse_perm(ai.perm)));
          int u = ai.to, v = aj.to;
          if (u <= v)
            acc[{{u, v}, comp}] += share;
          else
            acc[{{v, u}, inverse_perm(comp)}] += share;
        }
    }
  }
  for (const auto& [k, w] : acc) out.entries.push_back({k.first.first, k.first.second, w, k.second});
  return out;
}

// Objective of a tilde game under a Gram matrix indexed by W-position * R.
inline double tilde_objective(const TildeGame& tg, const std::vector<int>& w_index_of_vertex,
                              int r, const Eigen::MatrixXd& x) {
  double s = 0.0;
  for (const auto& e : tg.entries) {
    const int pu = w_index_of_vertex[e.u], pv = w_index_of_vertex[e.v];
    double term = 0.0;
    for (int a = 0; a < r; ++a) {
      const int ia = pu * r + a;
      const int jb = pv * r + e.perm[a];
      term += x(ia, ia) + x(jb, jb) - 2.0 * x(ia, jb);
    }
    s += e.w * term / r;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Decoding

// Decoded solution A_F(X~)_{ia',jb'} = X~_{F(i) pi_{F(i)<-i}(a'), F(j) ...}:
// pure entry copies, so feasibility (block traces, orthogonality) transfers
// exactly. F maps every base vertex to a member of W (by base vertex id);
// the identity permutation stands in when (i, F(i)) is not an edge.
inline Eigen::MatrixXd decode_solution(const Eigen::MatrixXd& x_sample,
                                       const std::vector<int>& w_set,
                                       const std::vector<int>& f_map, const UniqueGame& game) {
  const int r = game.label_count();
  std::vector<int> pos(game.n(), -1);
  for (std::size_t i = 0; i < w_set.size(); ++i) pos[w_set[i]] = static_cast<int>(i);
  GameAdjacency adj(game);
  // permutation towards F(i) per vertex
  std::vector<std::vector<int>> to_f(game.n());
  std::vector<int> idperm(r);
  for (int a = 0; a < r; ++a) idperm[a] = a;
  for (int i = 0; i < game.n(); ++i) {
    const int fi = f_map[i];
    if (fi < 0 || fi >= game.n() || pos[fi] < 0)
      throw std::invalid_argument("decode_solution: F(i) outside W");
    to_f[i] = idperm;
    for (const auto& a : adj.arcs[i])
      if (a.to == fi) { to_f[i] = a.perm; break; }
  }
  Eigen::MatrixXd out(game.n() * r, game.n() * r);
  for (int i = 0; i < game.n(); ++i)
    for (int j = 0; j < game.n(); ++j)
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
          out(i * r + a, j * r + b) =
              x_sample(pos[f_map[i]] * r + to_f[i][a], pos[f_map[j]] * r + to_f[j][b]);
  return out;
}

struct DecodeCheck {
  double lhs = 0.0;  // sdp(G)[E_F A_F(X~)]
  double rhs = 0.0;  // sdp(G~)[X~]
  int fallback_count = 0;
};

// Exact per-edge averaging of the decoding identity: F(i) and F(j) are
// independent uniform W-neighbors, so E_F factorizes entrywise.
inline DecodeCheck decode_expectation_check(const Eigen::MatrixXd& x_sample,
                                            const UniqueGame& game,
                                            const std::vector<int>& w_set) {
  const int r = game.label_count();
  const int n = game.n();
  std::vector<int> pos(n, -1);
  for (std::size_t i = 0; i < w_set.size(); ++i) pos[w_set[i]] = static_cast<int>(i);
  GameAdjacency adj(game);
  std::vector<char> in_w(n, 0);
  for (int v : w_set) in_w[v] = 1;
  std::vector<int> idperm(r);
  for (int a = 0; a < r; ++a) idperm[a] = a;
  DecodeCheck res;
  std::vector<std::vector<GameAdjacency::Arc>> wn(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& a : adj.arcs[i])
      if (in_w[a.to]) wn[i].push_back(a);
    if (wn[i].empty()) {
      ++res.fallback_count;
      for (int v : w_set) wn[i].push_back({v, 0.0, idperm});
    }
  }
  // averaged decoded matrix M = E_F A_F(X~)
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n * r, n * r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
          double acc = 0.0;
          if (i == j) {
            for (const auto& ai : wn[i])
              acc += x_sample(pos[ai.to] * r + ai.perm[a], pos[ai.to] * r + ai.perm[b]);
            acc /= wn[i].size();
          } else {
            for (const auto& ai : wn[i])
              for (const auto& aj : wn[j])
                acc += x_sample(pos[ai.to] * r + ai.perm[a], pos[aj.to] * r + aj.perm[b]);
            acc /= static_cast<double>(wn[i].size()) * wn[j].size();
          }
          m(i * r + a, j * r + b) = acc;
        }
    }
  res.lhs = ug_objective(game, m);
  auto tg = tilde_game(game, w_set);
  std::vector<int> w_index(n, -1);
  for (std::size_t i = 0; i < w_set.size(); ++i) w_index[w_set[i]] = static_cast<int>(i);
  res.rhs = tilde_objective(tg, w_index, r, x_sample);
  return res;
}

// ---------------------------------------------------------------------------
// Domination and the sandwich experiment

struct DominationReport {
  int trials = 0;
  int violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // 9 lhs - rhs
  double max_ratio = 0.0;                                       // rhs / lhs
  bool regular = true;
};

// Random block-normalized Gram point of M_1: Gaussian vectors per
// (vertex,label), each vertex bundle scaled to total norm 1; optional
// within-bundle Gram-Schmidt produces the stricter orthogonal family.
inline Eigen::MatrixXd random_m1_point(int n, int r, Rng& rng, bool gram_schmidt) {
  const int d = r + 3;
  Eigen::MatrixXd v(n * r, d);
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < d; ++j) v(i, j) = rng.next_gaussian();
  for (int vert = 0; vert < n; ++vert) {
    if (gram_schmidt) {
      for (int a = 0; a < r; ++a) {
        for (int b = 0; b < a; ++b) {
          double proj = v.row(vert * r + a).dot(v.row(vert * r + b)) /
                        v.row(vert * r + b).squaredNorm();
          v.row(vert * r + a) -= proj * v.row(vert * r + b);
        }
      }
    }
    double norm2 = 0.0;
    for (int a = 0; a < r; ++a) norm2 += v.row(vert * r + a).squaredNorm();
    v.middleRows(vert * r, r) /= std::sqrt(norm2);
  }
  return v * v.transpose();
}

inline DominationReport proxy_domination_check(const UniqueGame& game, int trials,
                                               std::uint64_t seed, bool gram_schmidt = false) {
  DominationReport rep;
  rep.trials = trials;
  auto degs = game.graph().weighted_degrees();
  for (double d : degs)
    if (std::abs(d - degs[0]) > 1e-9) { rep.regular = false; break; }
  auto cube = third_power(game);
  Rng rng(derive_seed(seed, 0xd0b1));
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd x = random_m1_point(game.n(), game.label_count(), rng, gram_schmidt);
    double lhs = ug_objective(game, x);
    double rhs = ug_objective(cube, x);
    double margin = 9.0 * lhs - rhs;
    rep.min_margin = std::min(rep.min_margin, margin);
    if (lhs > 1e-15) rep.max_ratio = std::max(rep.max_ratio, rhs / lhs);
    if (margin < -1e-9) ++rep.violations;
  }
  return rep;
}

struct SandwichReport {
  double full_value = 0.0;
  std::vector<double> sample_values;
  double mean = 0.0;
  double lower_margin = 0.0;  // mean - full/9 (positive when the bound holds with room)
  double upper_margin = 0.0;  // full - mean  (negative means the sample exceeded the full value)
};

// Measures E sdp_M(G[V_delta]) against the sandwich
// sdp_M(G)/9 - eps <= E <= sdp_M(G) + eps for M = base or base+triangle.
inline SandwichReport ug_subsample_sandwich(const UniqueGame& game, bool triangle_cuts,
                                            double delta, int trials, std::uint64_t seed,
                                            SdpOptions opts = {}) {
  SandwichReport rep;
  rep.full_value = ug_sdp(game, triangle_cuts, opts).value;
  for (int t = 0; t < trials; ++t) {
    auto sub = vertex_subsample_game(game, delta, derive_seed(seed, t));
    SdpOptions o = opts;
    o.seed = derive_seed(seed, 1000 + t);
    rep.sample_values.push_back(ug_sdp(sub, triangle_cuts, o).value);
  }
  double s = 0.0;
  for (double v : rep.sample_values) s += v;
  rep.mean = trials > 0 ? s / trials : 0.0;
  rep.lower_margin = rep.mean - rep.full_value / 9.0;
  rep.upper_margin = rep.full_value - rep.mean;
  return rep;
}

}  // namespace relax
