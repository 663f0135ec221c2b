// Normalized weighted graphs: total edge weight 1, so a graph doubles as a
// probability distribution over unordered vertex pairs.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relax/rng.hpp"

namespace relax {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

// Invariants: 0 <= u < v < n, no duplicate pairs, weights >= 0 summing to 1
// within 1e-12. Optional unit vectors per vertex (geometric graphs keep the
// sampled points for identity-embedding and hemisphere-cut checks).
class NormalizedGraph {
 public:
  NormalizedGraph() = default;
  NormalizedGraph(int n, std::vector<Edge> edges,
                  std::vector<Eigen::VectorXd> coords = {})
      : n_(n), edges_(std::move(edges)), coords_(std::move(coords)) {
    canonicalize();
    validate();
  }

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_coords() const { return !coords_.empty(); }
  const std::vector<Eigen::VectorXd>& coords() const { return coords_; }

  double total_weight() const {
    // compensated summation keeps the normalization invariant meaningful on
    // graphs with many edges
    double s = 0.0, carry = 0.0;
    for (const auto& e : edges_) {
      double y = e.w - carry;
      double t = s + y;
      carry = (t - s) - y;
      s = t;
    }
    return s;
  }

  Eigen::MatrixXd adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& e : edges_) {
      a(e.u, e.v) += e.w;
      a(e.v, e.u) += e.w;
    }
    return a;
  }

  // Combinatorial Laplacian of the weighted graph, L = D - A.
  Eigen::MatrixXd laplacian() const {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& e : edges_) {
      l(e.u, e.v) -= e.w;
      l(e.v, e.u) -= e.w;
      l(e.u, e.u) += e.w;
      l(e.v, e.v) += e.w;
    }
    return l;
  }

  std::vector<double> weighted_degrees() const {
    std::vector<double> d(n_, 0.0);
    for (const auto& e : edges_) {
      d[e.u] += e.w;
      d[e.v] += e.w;
    }
    return d;
  }

  std::vector<std::vector<int>> adjacency_lists() const {
    std::vector<std::vector<int>> adj(n_);
    for (const auto& e : edges_) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    return adj;
  }

  // Fraction of edge weight cut by the two-coloring x (entries 0/1 or +-1).
  template <typename Vec>
  double cut_value(const Vec& x) const {
    double s = 0.0;
    for (const auto& e : edges_)
      if (x[e.u] != x[e.v]) s += e.w;
    return s;
  }

  bool operator==(const NormalizedGraph& o) const {
    if (n_ != o.n_ || edges_.size() != o.edges_.size()) return false;
    for (std::size_t i = 0; i < edges_.size(); ++i)
      if (edges_[i].u != o.edges_[i].u || edges_[i].v != o.edges_[i].v ||
          edges_[i].w != o.edges_[i].w)
        return false;
    return true;
  }

 private:
  void canonicalize() {
    for (auto& e : edges_) {
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
  }

  void validate() const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.u == e.v) throw std::invalid_argument("self-loop in graph");
      if (e.u < 0 || e.v >= n_) throw std::invalid_argument("vertex id out of range");
      if (e.w < 0.0) throw std::invalid_argument("negative edge weight");
      if (i > 0 && edges_[i - 1].u == e.u && edges_[i - 1].v == e.v)
        throw std::invalid_argument("duplicate edge");
    }
    if (!edges_.empty() && std::abs(total_weight() - 1.0) > 1e-12)
      throw std::invalid_argument("edge weights do not sum to 1");
    if (!coords_.empty() && static_cast<int>(coords_.size()) != n_)
      throw std::invalid_argument("coords size mismatch");
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Eigen::VectorXd> coords_;
};

// Scales all weights by one positive factor so they sum to 1. Already
// normalized inputs pass through bit-for-bit (idempotence).
inline NormalizedGraph normalize(int n, std::vector<Edge> edges,
                                 std::vector<Eigen::VectorXd> coords = {}) {
  double s = 0.0, carry = 0.0;
  for (const auto& e : edges) {
    double y = e.w - carry;
    double t = s + y;
    carry = (t - s) - y;
    s = t;
  }
  if (s <= 0.0) throw std::invalid_argument("cannot normalize weightless graph");
  if (std::abs(s - 1.0) > 1e-12)
    for (auto& e : edges) e.w /= s;
  return NormalizedGraph(n, std::move(edges), std::move(coords));
}

inline NormalizedGraph normalize(const NormalizedGraph& g) {
  return normalize(g.n(), g.edges(), g.coords());
}

inline NormalizedGraph cycle_graph(int k) {
  std::vector<Edge> edges;
  for (int i = 0; i < k; ++i) edges.push_back({i, (i + 1) % k, 1.0});
  return normalize(k, std::move(edges));
}

inline NormalizedGraph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return normalize(n, std::move(edges));
}

inline NormalizedGraph path_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return normalize(n, std::move(edges));
}

inline NormalizedGraph complete_bipartite(int a, int b) {
  std::vector<Edge> edges;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) edges.push_back({i, a + j, 1.0});
  return normalize(a + b, std::move(edges));
}

// Erdos-Renyi G(n,p) with unit weights, then normalized.
inline NormalizedGraph gen_gnp(int n, double p, std::uint64_t seed) {
  if (p <= 0.0 || p > 1.0) throw std::invalid_argument("p must be in (0,1]");
  Rng rng(derive_seed(seed, 0x47'4e'50));
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.next_double() < p) edges.push_back({i, j, 1.0});
  if (edges.empty()) throw std::runtime_error("gen_gnp produced an empty graph");
  return normalize(n, std::move(edges));
}

namespace detail {

// Degree-preserving double-edge switches on a simple seed graph; the standard
// way to draw seeded Delta-regular graphs without pairing-model rejection.
inline NormalizedGraph switch_randomize(int n, std::vector<std::pair<int, int>> edge_list,
                                        Rng& rng, bool keep_orientation = false) {
  auto key = [n](int u, int v) {
    if (u > v) std::swap(u, v);
    return static_cast<std::uint64_t>(u) * n + v;
  };
  std::set<std::uint64_t> present;
  for (auto& [u, v] : edge_list) present.insert(key(u, v));
  const std::size_t m = edge_list.size();
  const std::size_t switches = 30 * m;
  for (std::size_t t = 0; t < switches; ++t) {
    std::size_t i = rng.next_below(m), j = rng.next_below(m);
    if (i == j) continue;
    auto [a, b] = edge_list[i];
    auto [c, d] = edge_list[j];
    if (!keep_orientation && rng.next_below(2)) std::swap(c, d);
    // propose (a,d), (c,b)
    if (a == d || c == b) continue;
    if (a == c || b == d) continue;
    if (present.count(key(a, d)) || present.count(key(c, b))) continue;
    present.erase(key(a, b));
    present.erase(key(c, d));
    present.insert(key(a, d));
    present.insert(key(c, b));
    edge_list[i] = {a, d};
    edge_list[j] = {c, b};
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  for (auto& [u, v] : edge_list) edges.push_back({u, v, 1.0});
  return normalize(n, std::move(edges));
}

}  // namespace detail

// Seeded random simple Delta-regular graph: circulant start plus
// degree-preserving edge switching.
inline NormalizedGraph gen_regular(int n, int degree, std::uint64_t seed) {
  if (degree <= 0 || degree >= n || (n * degree) % 2 != 0)
    throw std::invalid_argument("invalid regular graph parameters");
  std::vector<std::pair<int, int>> edge_list;
  for (int s = 1; s <= degree / 2; ++s)
    for (int i = 0; i < n; ++i) edge_list.push_back({i, (i + s) % n});
  if (degree % 2 == 1) {  // n even here since n*degree is even
    for (int i = 0; i < n / 2; ++i) edge_list.push_back({i, i + n / 2});
  }
  Rng rng(derive_seed(seed, 0x524547));
  return detail::switch_randomize(n, std::move(edge_list), rng);
}

// Seeded random bipartite Delta-regular graph on parts {0..n/2-1} and
// {n/2..n-1}. Triangle-free by construction; switches stay within the
// bipartite orientation (left endpoint first).
inline NormalizedGraph gen_regular_bipartite(int n, int degree, std::uint64_t seed) {
  if (n % 2 != 0) throw std::invalid_argument("bipartite regular graph needs even n");
  const int half = n / 2;
  if (degree <= 0 || degree > half) throw std::invalid_argument("invalid degree");
  std::vector<std::pair<int, int>> edge_list;
  for (int s = 0; s < degree; ++s)
    for (int i = 0; i < half; ++i) edge_list.push_back({i, half + (i + s) % half});
  Rng rng(derive_seed(seed, 0x424950));
  return detail::switch_randomize(n, std::move(edge_list), rng, /*keep_orientation=*/true);
}

inline int girth(const NormalizedGraph& g) {
  // BFS from every vertex; fine at desk scale.
  auto adj = g.adjacency_lists();
  int best = std::numeric_limits<int>::max();
  for (int s = 0; s < g.n(); ++s) {
    std::vector<int> dist(g.n(), -1), parent(g.n(), -1);
    std::vector<int> queue{s};
    dist[s] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int u = queue[qi];
      for (int v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          parent[v] = u;
          queue.push_back(v);
        } else if (v != parent[u]) {
          best = std::min(best, dist[u] + dist[v] + 1);
        }
      }
    }
  }
  return best;
}

// Exact max-cut fraction by enumeration over 2^(n-1) sign patterns.
inline double brute_force_maxcut(const NormalizedGraph& g, int cap_bits = 26) {
  if (g.n() > cap_bits) throw std::invalid_argument("graph too large for brute-force max-cut");
  const int n = g.n();
  double best = 0.0;
  std::vector<int> x(n, 0);
  const std::uint64_t total = n > 0 ? (1ULL << (n - 1)) : 1;
  for (std::uint64_t m = 0; m < total; ++m) {
    for (int i = 0; i + 1 < n; ++i) x[i] = static_cast<int>((m >> i) & 1);
    x[n - 1] = 0;
    best = std::max(best, g.cut_value(x));
  }
  return best;
}

}  // namespace relax
