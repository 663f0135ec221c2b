// Certification payloads: odd-cycle covers of the sphere graph, geometric
// max-cut certificates, the greedy seed-extension algorithm, and the PSD
// property tester.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relax/csp.hpp"
#include "relax/geometric.hpp"
#include "relax/io.hpp"
#include "relax/relaxations.hpp"
#include "relax/rng.hpp"
#include "relax/sdp.hpp"

namespace relax {

// ---------------------------------------------------------------------------
// Odd cycles at a prescribed edge level

// Smallest odd k whose maximal-stride circular cycle reaches squared
// half-distance cos^2(pi/(2k)) >= l; the level is then lowered to exactly l
// by sliding all vertices along a direction orthogonal to the circle plane
// (bisection on the offset). Consistent with cycle lengths O(1/sqrt(gamma)).
inline std::vector<Eigen::VectorXd> odd_cycle_at_level(int d, double gamma, double l) {
  if (d < 3) throw std::invalid_argument("odd_cycle_at_level needs d >= 3");
  if (l < 1.0 - gamma - 1e-12 || l > 1.0 - gamma / 2 + 1e-12)
    throw std::invalid_argument("level " + std::to_string(l) + " outside [1-gamma, 1-gamma/2]");
  if (l <= 0.0 || l >= 1.0)
    throw std::invalid_argument("no odd cycle exists at level " + std::to_string(l));
  int k = static_cast<int>(std::ceil(std::numbers::pi / (2.0 * std::asin(std::sqrt(1.0 - l)))));
  if (k % 2 == 0) ++k;
  while (std::cos(std::numbers::pi / (2.0 * k)) * std::cos(std::numbers::pi / (2.0 * k)) < l) {
    k += 2;
    if (k > 1000000)
      throw std::runtime_error("no feasible odd cycle at level " + std::to_string(l));
  }
  const double step = std::numbers::pi * (1.0 - 1.0 / k);  // maximal-stride chord angle
  const double l0 = std::cos(std::numbers::pi / (2.0 * k)) * std::cos(std::numbers::pi / (2.0 * k));
  // level(h) = (1 - h^2) * l0, decreasing in h
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double level = (1.0 - mid * mid) * l0;
    if (std::abs(level - l) < 1e-14) { lo = hi = mid; break; }
    if (level > l) lo = mid; else hi = mid;
    if (hi - lo < 1e-12) break;
  }
  const double h = 0.5 * (lo + hi);
  const double c = std::sqrt(1.0 - h * h);
  std::vector<Eigen::VectorXd> cycle;
  cycle.reserve(k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(0) = c * std::cos(j * step);
    v(1) = c * std::sin(j * step);
    v(2) = h;
    cycle.push_back(std::move(v));
  }
  return cycle;
}

inline Eigen::MatrixXd haar_rotation(int d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

struct SnappedCycle {
  std::vector<Eigen::VectorXd> points;  // rotated exact cycle
  std::vector<int> vertices;            // nearest graph vertex per point
  std::vector<double> snap_distance;
  double level = 0.0;
};

struct CycleCover {
  std::vector<SnappedCycle> cycles;
  int failures = 0;   // sampled edges with level > 1 - gamma/2
  int attempts = 0;
  std::map<std::pair<int, int>, double> marginal;  // over snapped cycle edges
  double marginal_tv_to_uniform = 0.0;
};

// Lifts `count` random edges of the realized geometric graph to odd cycles at
// the sampled level, applies Haar rotations, and snaps cycle vertices to the
// nearest graph vertices.
inline CycleCover sample_cycle_cover(const GeometricSpec& spec, int count) {
  auto g = gen_geometric(spec);
  const auto& pts = g.coords();
  Rng rng(derive_seed(spec.seed, 0xc0'4e'12));
  CycleCover cover;
  cover.attempts = count;
  for (int c = 0; c < count; ++c) {
    const auto& e = g.edges()[rng.next_below(g.edge_count())];
    const double level = edge_level(pts[e.u], pts[e.v]);
    if (level > 1.0 - spec.gamma / 2) {
      ++cover.failures;
      continue;
    }
    auto cycle = odd_cycle_at_level(spec.d, spec.gamma, level);
    Eigen::MatrixXd rot = haar_rotation(spec.d, rng);
    SnappedCycle sc;
    sc.level = level;
    for (auto& v : cycle) {
      Eigen::VectorXd rv = rot * v;
      int best = 0;
      double best_d2 = (pts[0] - rv).squaredNorm();
      for (int i = 1; i < g.n(); ++i) {
        double d2 = (pts[i] - rv).squaredNorm();
        if (d2 < best_d2) { best_d2 = d2; best = i; }
      }
      sc.snap_distance.push_back(std::sqrt(best_d2));
      sc.vertices.push_back(best);
      sc.points.push_back(std::move(rv));
    }
    cover.cycles.push_back(std::move(sc));
  }
  if (cover.attempts > 0 && cover.failures * 2 > cover.attempts)
    throw std::runtime_error("cycle cover failure rate above 1/2; dimension too small for the "
                             "concentration regime");
  double total = 0.0;
  for (const auto& sc : cover.cycles) {
    const int k = static_cast<int>(sc.vertices.size());
    for (int i = 0; i < k; ++i) {
      int u = sc.vertices[i], v = sc.vertices[(i + 1) % k];
      if (u == v) continue;  // degenerate snap
      cover.marginal[{std::min(u, v), std::max(u, v)}] += 1.0;
      total += 1.0;
    }
  }
  if (total > 0)
    for (auto& [k, v] : cover.marginal) v /= total;
  double tv = 0.0;
  const double uniform = 1.0 / g.edge_count();
  std::size_t seen = 0;
  for (const auto& e : g.edges()) {
    auto it = cover.marginal.find({e.u, e.v});
    double m = it == cover.marginal.end() ? 0.0 : it->second;
    if (it != cover.marginal.end()) ++seen;
    tv += std::abs(m - uniform);
  }
  for (const auto& [k, v] : cover.marginal)
    if (std::find_if(g.edges().begin(), g.edges().end(), [&](const Edge& e) {
          return e.u == k.first && e.v == k.second;
        }) == g.edges().end())
      tv += v;  // mass on snapped pairs that are not graph edges
  cover.marginal_tv_to_uniform = 0.5 * tv;
  return cover;
}

// ---------------------------------------------------------------------------
// Geometric certification

struct Certificate {
  std::string graph_sha;
  std::string method;
  double upper_bound = 0.0;
  double gw_baseline = 0.0;
  GeometricSpec spec;
  int n = 0;
  double solver_residual = 0.0;
  long solver_iterations = 0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"graph_sha", graph_sha}, {"method", method},
                          {"upper_bound", upper_bound}, {"gw_baseline", gw_baseline},
                          {"gamma", spec.gamma},       {"d", spec.d},
                          {"n", n},                    {"seed", spec.seed},
                          {"solver", nlohmann::json{{"residual", solver_residual},
                                                    {"iterations", solver_iterations}}}};
  }
};

inline Certificate certify_geometric_maxcut(const GeometricSpec& spec, SdpOptions opts = {}) {
  auto g = gen_geometric(spec);
  auto s3 = sdp3(g, opts);
  auto gw = gw_sdp(g, opts);
  Certificate cert;
  cert.graph_sha = instance_sha(g);
  cert.method = "sdp3";
  cert.upper_bound = s3.value;
  cert.gw_baseline = gw.value;
  cert.spec = spec;
  cert.n = g.n();
  cert.solver_residual = s3.primal_residual;
  cert.solver_iterations = s3.iterations;
  return cert;
}

struct HemisphereCut {
  double first_coordinate_cut = 0.0;
  double best_random_cut = 0.0;
};

// Cut induced by the sign of the first coordinate, plus the best of `trials`
// random hyperplane cuts through the origin.
inline HemisphereCut hemisphere_cut(const NormalizedGraph& g, int trials = 100,
                                    std::uint64_t seed = 0) {
  if (!g.has_coords()) throw std::invalid_argument("hemisphere_cut needs vertex coordinates");
  const auto& pts = g.coords();
  std::vector<int> side(g.n());
  for (int i = 0; i < g.n(); ++i) side[i] = pts[i](0) >= 0 ? 1 : 0;
  HemisphereCut res;
  res.first_coordinate_cut = g.cut_value(side);
  res.best_random_cut = res.first_coordinate_cut;
  Rng rng(derive_seed(seed, 0x4e0d));
  const int d = static_cast<int>(pts[0].size());
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd normal = random_unit_vector(rng, d);
    for (int i = 0; i < g.n(); ++i) side[i] = normal.dot(pts[i]) >= 0 ? 1 : 0;
    res.best_random_cut = std::max(res.best_random_cut, g.cut_value(side));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Greedy seed extension

// Extends the seed assignment y (read on S = union of s_blocks) to the free
// variables of every block: block l sets U_l \ S to the argmax over the
// constraints whose scope lies inside S_l together with those free variables
// (ties resolved lexicographically). Entries outside U are left at 0.
inline Assignment greedy_extend(const CspInstance& csp, const std::vector<int>& u_set,
                                const std::vector<std::vector<int>>& u_blocks,
                                const std::vector<std::vector<int>>& s_blocks,
                                const Assignment& y) {
  if (u_blocks.size() != s_blocks.size())
    throw std::invalid_argument("block structures must align");
  std::size_t covered = 0;
  for (const auto& b : u_blocks) covered += b.size();
  if (covered != u_set.size())
    throw std::invalid_argument("u_blocks must partition U");
  const int q = csp.q();
  std::vector<char> in_s(csp.n(), 0);
  for (const auto& sb : s_blocks)
    for (int v : sb) in_s[v] = 1;
  Assignment z(csp.n(), 0);
  for (const auto& sb : s_blocks)
    for (int v : sb) z[v] = y[v];
  for (std::size_t l = 0; l < u_blocks.size(); ++l) {
    std::vector<int> free_vars;
    for (int v : u_blocks[l])
      if (!in_s[v]) free_vars.push_back(v);
    if (free_vars.empty()) continue;
    double space = std::pow(static_cast<double>(q), static_cast<double>(free_vars.size()));
    if (space > double(1 << 20))
      throw std::invalid_argument("greedy_extend block " + std::to_string(l) +
                                  " too large for exact maximization");
    // constraints that live inside S_l plus this block's free variables
    std::vector<char> allowed(csp.n(), 0);
    for (int v : s_blocks[l]) allowed[v] = 1;
    for (int v : free_vars) allowed[v] = 1;
    std::vector<const Constraint*> local;
    for (const auto& c : csp.constraints()) {
      bool inside = true;
      for (int v : c.scope)
        if (!allowed[v]) { inside = false; break; }
      if (inside) local.push_back(&c);
    }
    // lexicographic odometer over the free variables; first strict max wins
    Assignment x = z;
    for (int v : free_vars) x[v] = 0;
    auto value_of = [&]() {
      double s = 0.0;
      for (const Constraint* c : local) s += c->table[csp.table_index(*c, x)];
      return s;
    };
    double best = value_of();
    Assignment best_x = x;
    for (;;) {
      int pos = static_cast<int>(free_vars.size()) - 1;
      while (pos >= 0 && x[free_vars[pos]] == q - 1) x[free_vars[pos--]] = 0;
      if (pos < 0) break;
      ++x[free_vars[pos]];
      double v = value_of();
      if (v > best + 1e-12) {
        best = v;
        best_x = x;
      }
    }
    for (int v : free_vars) z[v] = best_x[v];
  }
  return z;
}

// Driver matching the experiment shape: partition U into m equal blocks and
// draw each seed panel S_l from U \ U_l, disjointly across blocks.
struct GreedyBlocks {
  std::vector<std::vector<int>> u_blocks;
  std::vector<std::vector<int>> s_blocks;
};

inline GreedyBlocks make_greedy_blocks(const std::vector<int>& u_set, int m, double alpha,
                                       std::uint64_t seed) {
  GreedyBlocks out;
  const int usz = static_cast<int>(u_set.size());
  std::vector<int> shuffled = u_set;
  Rng rng(derive_seed(seed, 0x6b5e));
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
  out.u_blocks.resize(m);
  for (int i = 0; i < usz; ++i) out.u_blocks[i % m].push_back(shuffled[i]);
  const int per_block = std::max(1, static_cast<int>(alpha * usz / m));
  std::vector<char> taken(1 + *std::max_element(u_set.begin(), u_set.end()), 0);
  std::vector<char> in_block(taken.size(), 0);
  out.s_blocks.resize(m);
  for (int l = 0; l < m; ++l) {
    std::fill(in_block.begin(), in_block.end(), 0);
    for (int v : out.u_blocks[l]) in_block[v] = 1;
    std::vector<int> pool;
    for (int v : u_set)
      if (!in_block[v] && !taken[v]) pool.push_back(v);
    for (int c = 0; c < per_block && !pool.empty(); ++c) {
      std::size_t pick = rng.next_below(pool.size());
      out.s_blocks[l].push_back(pool[pick]);
      taken[pool[pick]] = 1;
      pool.erase(pool.begin() + pick);
    }
    std::sort(out.s_blocks[l].begin(), out.s_blocks[l].end());
  }
  for (auto& b : out.u_blocks) std::sort(b.begin(), b.end());
  return out;
}

// ---------------------------------------------------------------------------
// PSD property tester

struct PsdTestResult {
  bool accepted = true;
  int k = 0;
  double box_min = 0.0;          // min over [-1,1]^k of the rescaled quadratic form
  std::vector<int> sample;       // sampled row/column indices
};

// Samples a k x k principal submatrix with k = ceil(c D^2 / eps^2), rescales
// by (n/k)^2, and rejects iff the box minimum of the quadratic form drops
// below -eps/2. Exact minimization: sign-vertex enumeration plus one
// coordinate-descent pass from every vertex (positive-diagonal coordinates
// can have interior optima).
inline PsdTestResult psd_tester(const std::function<double(int, int)>& oracle, int n, double eps,
                                double d_bound, std::uint64_t seed, double c_const = 16.0) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  PsdTestResult res;
  res.k = static_cast<int>(std::ceil(c_const * d_bound * d_bound / (eps * eps)));
  res.k = std::min(res.k, n);
  if (res.k > 20)
    throw std::invalid_argument(
        "sample too large for exact box optimization; reduce D/eps ratio (k = " +
        std::to_string(res.k) + ")");
  Rng rng(derive_seed(seed, 0x95d));
  res.sample = rng.sample_subset(n, res.k);
  const int k = res.k;
  Eigen::MatrixXd b(k, k);
  const double scale = (static_cast<double>(n) / k) * (static_cast<double>(n) / k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) b(i, j) = scale * oracle(res.sample[i], res.sample[j]);
  Eigen::MatrixXd bs = 0.5 * (b + b.transpose());

  Eigen::VectorXd x = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd s = bs * x;
  double val = x.dot(s);
  double best = val;
  auto refine_from = [&](Eigen::VectorXd xx) {
    Eigen::VectorXd ss = bs * xx;
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < k; ++i) {
        const double qii = bs(i, i);
        const double ri = ss(i) - qii * xx(i);
        double xi_new;
        if (qii > 1e-15)
          xi_new = std::clamp(-ri / qii, -1.0, 1.0);
        else
          xi_new = ri >= 0 ? -1.0 : 1.0;
        const double dx = xi_new - xx(i);
        if (dx != 0.0) {
          ss += dx * bs.col(i);
          xx(i) = xi_new;
        }
      }
    }
    best = std::min(best, xx.dot(bs * xx));
  };
  refine_from(x);
  const std::uint64_t total = k >= 63 ? 0 : (1ULL << k);
  for (std::uint64_t m = 1; m < total; ++m) {
    const int i = std::countr_zero(m);
    const double xi_old = x(i);
    x(i) = -x(i);
    val += -4.0 * xi_old * s(i) + 4.0 * bs(i, i);
    s += (2.0 * x(i)) * bs.col(i);
    if ((m & 0xffff) == 0) val = x.dot(bs * x);  // drift control
    best = std::min(best, val);
    refine_from(x);
  }
  res.box_min = best;
  res.accepted = best > -eps / 2;
  return res;
}

}  // namespace relax
