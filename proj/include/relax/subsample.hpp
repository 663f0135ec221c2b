// Vertex and edge subsampling operators with the delta^-k payoff rescaling,
// influence/pruning machinery, and deviation-bound diagnostics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "relax/csp.hpp"
#include "relax/graph.hpp"
#include "relax/rng.hpp"
#include "relax/unique_game.hpp"

namespace relax {

// Default is the theorem-statement convention |U| = floor(delta*n) without
// replacement. Bernoulli keeps each vertex independently (the only mode where
// E[P_U(x)] = P(x) holds exactly); WithReplacement mirrors the proof.
enum class SampleMode { FixedSize, Bernoulli, WithReplacement };

inline std::vector<int> sample_vertices(int n, double delta, std::uint64_t seed,
                                        SampleMode mode) {
  if (delta <= 0.0 || delta > 1.0) throw std::invalid_argument("delta must be in (0,1]");
  Rng rng(derive_seed(seed, 0x765254));
  switch (mode) {
    case SampleMode::FixedSize: {
      int u = static_cast<int>(std::floor(delta * n));
      return rng.sample_subset(n, std::min(u, n));
    }
    case SampleMode::Bernoulli: {
      std::vector<int> out;
      for (int i = 0; i < n; ++i)
        if (rng.next_double() < delta) out.push_back(i);
      return out;
    }
    case SampleMode::WithReplacement: {
      int draws = static_cast<int>(std::floor(delta * n));
      std::vector<char> seen(n, 0);
      for (int d = 0; d < draws; ++d) seen[rng.next_below(n)] = 1;
      std::vector<int> out;
      for (int i = 0; i < n; ++i)
        if (seen[i]) out.push_back(i);
      return out;
    }
  }
  return {};
}

// P_U = { delta^-k P : P in P_total, var(P) subseteq U }, evaluated against
// the ORIGINAL norm denominator |P_total|. Variables keep their ids (the
// instance stays on n variables). The scaling delta is the realized |U|/n
// for fixed-size/with-replacement sampling and the requested probability for
// Bernoulli sampling (which is what makes E[P_U(x)] = P(x) exact).
struct CspSample {
  CspInstance csp;
  std::vector<int> vertices;
  double realized_delta = 0.0;
};

inline CspSample vertex_subsample(const CspInstance& csp, double delta, std::uint64_t seed,
                                  SampleMode mode = SampleMode::FixedSize) {
  const int n = csp.n();
  if (mode == SampleMode::FixedSize && std::floor(delta * n) < csp.k())
    throw std::invalid_argument("sample smaller than constraint arity");
  auto u = sample_vertices(n, delta, seed, mode);
  std::vector<char> in_u(n, 0);
  for (int v : u) in_u[v] = 1;
  const double realized = static_cast<double>(u.size()) / n;
  const double scale_delta = mode == SampleMode::Bernoulli ? delta : realized;
  const double scale = std::pow(1.0 / scale_delta, csp.k());
  std::vector<Constraint> kept;
  for (const auto& c : csp.constraints()) {
    bool inside = true;
    for (int v : c.scope)
      if (!in_u[v]) { inside = false; break; }
    if (!inside) continue;
    Constraint sc = c;
    for (auto& t : sc.table) t *= scale;
    kept.push_back(std::move(sc));
  }
  CspInstance out(n, csp.q(), csp.k(), std::move(kept), /*allow_scaled=*/true,
                  csp.norm_denominator());
  return {std::move(out), std::move(u), realized};
}

struct GraphSample {
  NormalizedGraph graph;   // induced subgraph, relabeled 0..|U|-1, re-normalized
  std::vector<int> vertices;
  double realized_delta = 0.0;
};

inline GraphSample vertex_subsample_graph(const NormalizedGraph& g, double delta,
                                          std::uint64_t seed,
                                          SampleMode mode = SampleMode::FixedSize) {
  auto u = sample_vertices(g.n(), delta, seed, mode);
  std::vector<int> pos(g.n(), -1);
  for (std::size_t i = 0; i < u.size(); ++i) pos[u[i]] = static_cast<int>(i);
  std::vector<Edge> kept;
  for (const auto& e : g.edges())
    if (pos[e.u] >= 0 && pos[e.v] >= 0) kept.push_back({pos[e.u], pos[e.v], e.w});
  if (kept.empty()) throw std::runtime_error("vertex subsample induced an empty edge set");
  return {normalize(static_cast<int>(u.size()), std::move(kept)), std::move(u),
          static_cast<double>(u.size()) / g.n()};
}

inline UniqueGame vertex_subsample_game(const UniqueGame& game, double delta,
                                        std::uint64_t seed,
                                        SampleMode mode = SampleMode::FixedSize) {
  auto u = sample_vertices(game.n(), delta, seed, mode);
  return game.induced(u);
}

struct EdgeSample {
  NormalizedGraph graph;    // surviving edges on the full vertex set, re-normalized
  double kept_weight = 0.0; // original weight mass of the surviving edges
  double realized_delta = 0.0;
};

inline EdgeSample edge_subsample(const NormalizedGraph& g, double delta, std::uint64_t seed) {
  if (delta <= 0.0 || delta > 1.0) throw std::invalid_argument("delta must be in (0,1]");
  const int m = static_cast<int>(g.edge_count());
  const int keep = static_cast<int>(std::floor(delta * m));
  if (keep < 1) throw std::invalid_argument("edge sample would be empty");
  Rng rng(derive_seed(seed, 0x655355));
  auto idx = rng.sample_subset(m, keep);
  std::vector<Edge> kept;
  double mass = 0.0;
  for (int i : idx) {
    kept.push_back(g.edges()[i]);
    mass += g.edges()[i].w;
  }
  return {normalize(g.n(), std::move(kept)), mass, static_cast<double>(keep) / m};
}

// ---------------------------------------------------------------------------
// Influence and pruning

struct InfluenceProfile {
  std::vector<double> influence;  // Inf_i = (1/|P_total|) sum_{P: i in var(P)} |P|
  double mean = 0.0;              // N: average over all variables
  double support_mean = 0.0;      // average over variables with any constraint
  double prune_threshold = 0.0;   // 2 * support_mean; on subsamples the
                                  // all-variable mean would halve the
                                  // threshold and prune most of the mass
};

inline InfluenceProfile influence_profile(const CspInstance& csp) {
  InfluenceProfile prof;
  prof.influence.assign(csp.n(), 0.0);
  for (const auto& c : csp.constraints()) {
    double norm = constraint_norm(c);
    for (int v : c.scope) prof.influence[v] += norm / csp.norm_denominator();
  }
  double total = 0.0;
  int live = 0;
  for (double f : prof.influence) {
    total += f;
    if (f > 0.0) ++live;
  }
  prof.mean = csp.n() > 0 ? total / csp.n() : 0.0;
  prof.support_mean = live > 0 ? total / live : 0.0;
  prof.prune_threshold = 2.0 * prof.support_mean;
  return prof;
}

struct PruneResult {
  CspInstance csp;
  double removed_norm = 0.0;  // constraint mass removed, normalized by |P_total|
  bool emptied = false;
};

// Removes every constraint containing a variable whose influence exceeds the
// threshold; influences are measured on the input instance.
inline PruneResult prune(const CspInstance& csp, double threshold) {
  if (threshold <= 0.0) throw std::invalid_argument("prune threshold must be positive");
  auto prof = influence_profile(csp);
  std::vector<Constraint> kept;
  double removed = 0.0;
  for (const auto& c : csp.constraints()) {
    bool over = false;
    for (int v : c.scope)
      if (prof.influence[v] > threshold) { over = true; break; }
    if (over)
      removed += constraint_norm(c) / csp.norm_denominator();
    else
      kept.push_back(c);
  }
  PruneResult res{CspInstance(csp.n(), csp.q(), csp.k(), std::move(kept), /*allow_scaled=*/true,
                              csp.norm_denominator()),
                  removed, false};
  res.emptied = res.csp.constraints().empty();
  return res;
}

// ---------------------------------------------------------------------------
// Deviation diagnostics

struct DegreeTailPoint {
  double t = 0.0;               // absolute deviation threshold
  double empirical = 0.0;       // observed Pr(|Z - EZ| > t)
  double fourth_moment_bound = 0.0;  // mu^2 / t^4
};

struct DegreeConcentrationReport {
  double mean_abs_deviation = 0.0;  // E|Z - EZ| / EZ averaged over vertices
  std::vector<DegreeTailPoint> tail;
  int trials = 0;
};

// Z = number of neighbors of a vertex surviving in V_delta, compared against
// the fourth-moment tail Pr(|Z - EZ| > t) <= O(mu^2)/t^4.
inline DegreeConcentrationReport degree_concentration(const NormalizedGraph& g, double delta,
                                                      int trials, std::uint64_t seed) {
  auto adj = g.adjacency_lists();
  const int n = g.n();
  DegreeConcentrationReport rep;
  rep.trials = trials;
  std::vector<double> rel_devs;
  std::vector<double> t_factors{1.5, 2.0};
  std::vector<long> exceed(t_factors.size(), 0);
  long samples = 0;
  double mu_mean = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    auto u = sample_vertices(n, delta, derive_seed(seed, trial), SampleMode::FixedSize);
    std::vector<char> in_u(n, 0);
    for (int v : u) in_u[v] = 1;
    const double frac = static_cast<double>(u.size()) / n;
    for (int v = 0; v < n; ++v) {
      double mu = frac * adj[v].size();
      if (mu <= 0.0) continue;
      int z = 0;
      for (int w : adj[v])
        if (in_u[w]) ++z;
      double dev = std::abs(z - mu);
      rel_devs.push_back(dev / mu);
      mu_mean += mu;
      ++samples;
      for (std::size_t ti = 0; ti < t_factors.size(); ++ti)
        if (dev > t_factors[ti] * mu) ++exceed[ti];
    }
  }
  if (samples == 0) return rep;
  mu_mean /= samples;
  double s = 0.0;
  for (double d : rel_devs) s += d;
  rep.mean_abs_deviation = s / samples;
  for (std::size_t ti = 0; ti < t_factors.size(); ++ti) {
    double t = t_factors[ti] * mu_mean;
    rep.tail.push_back({t, static_cast<double>(exceed[ti]) / samples,
                        mu_mean * mu_mean / (t * t * t * t)});
  }
  return rep;
}

// McDiarmid tail bound 2 exp(-2 t^2 / sum c_i^2).
inline double mcdiarmid_bound(const std::vector<double>& lipschitz, double t) {
  if (t <= 0.0) throw std::invalid_argument("t must be positive");
  double s = 0.0;
  for (double c : lipschitz) {
    if (c < 0.0) throw std::invalid_argument("lipschitz constants must be nonnegative");
    s += c * c;
  }
  if (s == 0.0) return 0.0;
  return 2.0 * std::exp(-2.0 * t * t / s);
}

}  // namespace relax
