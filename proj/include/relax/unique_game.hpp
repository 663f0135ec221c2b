// Unique games: a normalized constraint graph plus one permutation of the
// label set per edge, treated as minimization of violated-constraint mass.
// Constraints are stored once in canonical orientation (u < v, permutation
// mapping labels of u to labels of v); the reverse direction is the inverse.
// Parallel constraints on a pair with different permutations are allowed
// (multigames arise as third powers); such games are flagged non-simple.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "relax/graph.hpp"

namespace relax {

struct UgConstraint {
  int u = 0;
  int v = 0;
  double w = 0.0;
  std::vector<int> perm;  // label a at u forces perm[a] at v
};

inline std::vector<int> inverse_perm(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) inv[p[a]] = static_cast<int>(a);
  return inv;
}

inline std::vector<int> compose_perm(const std::vector<int>& outer, const std::vector<int>& inner) {
  std::vector<int> out(inner.size());
  for (std::size_t a = 0; a < inner.size(); ++a) out[a] = outer[inner[a]];
  return out;
}

inline bool is_permutation(const std::vector<int>& p, int r) {
  if (static_cast<int>(p.size()) != r) return false;
  std::vector<bool> seen(r, false);
  for (int x : p) {
    if (x < 0 || x >= r || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

class UniqueGame {
 public:
  UniqueGame() = default;
  UniqueGame(int n, int r, std::vector<UgConstraint> constraints)
      : n_(n), r_(r), constraints_(std::move(constraints)) {
    double total = 0.0;
    for (auto& c : constraints_) {
      if (c.u == c.v) throw std::invalid_argument("self-loop constraint");
      if (c.u < 0 || c.u >= n_ || c.v < 0 || c.v >= n_)
        throw std::invalid_argument("constraint endpoint out of range");
      if (!is_permutation(c.perm, r_)) throw std::invalid_argument("constraint is not a permutation");
      if (c.w < 0.0) throw std::invalid_argument("negative constraint weight");
      if (c.u > c.v) {
        std::swap(c.u, c.v);
        c.perm = inverse_perm(c.perm);
      }
      total += c.w;
    }
    std::sort(constraints_.begin(), constraints_.end(),
              [](const UgConstraint& a, const UgConstraint& b) {
                if (a.u != b.u) return a.u < b.u;
                if (a.v != b.v) return a.v < b.v;
                return a.perm < b.perm;
              });
    if (!constraints_.empty() && std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("constraint weights do not sum to 1");
  }

  int n() const { return n_; }
  int label_count() const { return r_; }
  const std::vector<UgConstraint>& constraints() const { return constraints_; }

  bool is_simple() const {
    for (std::size_t i = 1; i < constraints_.size(); ++i)
      if (constraints_[i - 1].u == constraints_[i].u && constraints_[i - 1].v == constraints_[i].v)
        return false;
    return true;
  }

  // Permutation on the ordered edge (u,v); requires a simple game.
  std::vector<int> perm(int u, int v) const {
    for (const auto& c : constraints_) {
      if (c.u == std::min(u, v) && c.v == std::max(u, v)) {
        return u < v ? c.perm : inverse_perm(c.perm);
      }
    }
    throw std::invalid_argument("no constraint on requested edge");
  }

  // Constraint graph with parallel constraints merged into edge weights.
  NormalizedGraph graph() const {
    std::map<std::pair<int, int>, double> w;
    for (const auto& c : constraints_) w[{c.u, c.v}] += c.w;
    std::vector<Edge> edges;
    for (const auto& [uv, weight] : w) edges.push_back({uv.first, uv.second, weight});
    return NormalizedGraph(n_, std::move(edges));
  }

  // Fraction of constraint mass violated by the labeling x.
  double violation(const std::vector<int>& x) const {
    double s = 0.0;
    for (const auto& c : constraints_)
      if (c.perm[x[c.u]] != x[c.v]) s += c.w;
    return s;
  }

  // Restriction to the constraints inside `subset` (ascending vertex ids),
  // relabeled to 0..|subset|-1 and re-normalized.
  UniqueGame induced(const std::vector<int>& subset) const {
    std::vector<int> pos(n_, -1);
    for (std::size_t i = 0; i < subset.size(); ++i) pos[subset[i]] = static_cast<int>(i);
    std::vector<UgConstraint> kept;
    double total = 0.0;
    for (const auto& c : constraints_)
      if (pos[c.u] >= 0 && pos[c.v] >= 0) {
        kept.push_back({pos[c.u], pos[c.v], c.w, c.perm});
        total += c.w;
      }
    if (kept.empty()) throw std::runtime_error("induced game has no constraints");
    for (auto& c : kept) c.w /= total;
    return UniqueGame(static_cast<int>(subset.size()), r_, std::move(kept));
  }

 private:
  int n_ = 0;
  int r_ = 1;
  std::vector<UgConstraint> constraints_;
};

// Max-cut as a unique game: R = 2 and every edge carries the swap, so
// opt(G) = 1 - opt(game) as a minimization.
inline UniqueGame maxcut_as_unique_game(const NormalizedGraph& g) {
  std::vector<UgConstraint> cs;
  cs.reserve(g.edge_count());
  for (const auto& e : g.edges()) cs.push_back({e.u, e.v, e.w, {1, 0}});
  return UniqueGame(g.n(), 2, std::move(cs));
}

// Value of the unique-game SDP objective E_(u,v) E_a ||u_a - v_pi(a)||^2
// under the Gram matrix X indexed by vertex*R + label. This is the single
// place that fixes the sign/normalization conventions shared by the solver
// and the proxy-game checks.
inline double ug_objective(const UniqueGame& game, const Eigen::MatrixXd& x) {
  const int r = game.label_count();
  double s = 0.0;
  for (const auto& c : game.constraints()) {
    double term = 0.0;
    for (int a = 0; a < r; ++a) {
      const int ia = c.u * r + a;
      const int jb = c.v * r + c.perm[a];
      term += x(ia, ia) + x(jb, jb) - 2.0 * x(ia, jb);
    }
    s += c.w * term / r;
  }
  return s;
}

}  // namespace relax
