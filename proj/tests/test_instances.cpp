#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "relax/csp.hpp"
#include "relax/geometric.hpp"
#include "relax/graph.hpp"
#include "relax/rng.hpp"
#include "relax/unique_game.hpp"

using namespace relax;

namespace {

// Independent oracle: exhaustive CSP maximization recursing over variables in
// reverse order, evaluating every table from scratch.
void enumerate_reverse(const CspInstance& csp, Assignment& x, int var, double& best,
                       Assignment& witness) {
  if (var < 0) {
    double v = evaluate(csp, x);
    if (v > best + 1e-12) {
      best = v;
      witness = x;
    }
    return;
  }
  for (int a = csp.q() - 1; a >= 0; --a) {
    x[var] = a;
    enumerate_reverse(csp, x, var - 1, best, witness);
  }
  x[var] = 0;
}

CspInstance random_2csp(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Constraint> cs;
  for (int t = 0; t < m; ++t) {
    int u = static_cast<int>(rng.next_below(n));
    int v = static_cast<int>(rng.next_below(n));
    while (v == u) v = static_cast<int>(rng.next_below(n));
    std::vector<double> table(4);
    for (auto& ti : table) ti = rng.next_double();
    cs.push_back({{u, v}, table});
  }
  return CspInstance(n, 2, 2, std::move(cs));
}

}  // namespace

TEST(Normalize, TriangleUniform) {
  auto g = cycle_graph(3);
  for (const auto& e : g.edges()) EXPECT_NEAR(e.w, 1.0 / 3.0, 1e-15);
}

TEST(Normalize, SingleEdgeWeightSeven) {
  auto g = normalize(2, {{0, 1, 7.0}});
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(g.edges()[0].w, 1.0);
}

TEST(Normalize, RegularGraphWeights) {
  const int n = 12, delta = 4;
  auto g = gen_regular(n, delta, 5);
  for (const auto& e : g.edges()) EXPECT_NEAR(e.w, 2.0 / (delta * n), 1e-15);
}

TEST(Normalize, Idempotent) {
  auto g = gen_gnp(20, 0.3, 11);
  auto g2 = normalize(g);
  EXPECT_TRUE(g == g2);
}

TEST(Normalize, EmptyGraphErrors) {
  EXPECT_THROW(normalize(3, {}), std::invalid_argument);
}

TEST(GraphInvariants, RejectsBadEdges) {
  EXPECT_THROW(NormalizedGraph(3, {{0, 0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(NormalizedGraph(3, {{0, 1, 0.5}, {1, 0, 0.5}}), std::invalid_argument);
  EXPECT_THROW(NormalizedGraph(2, {{0, 1, 0.5}}), std::invalid_argument);  // sum != 1
}

TEST(GenGeometric, NearCompleteAtGammaNearOne) {
  auto g = gen_geometric({10, 3, 0.999, 42});
  EXPECT_EQ(g.edge_count(), 45u);  // all pairs
}

TEST(GenGeometric, Deterministic) {
  GeometricSpec spec{40, 4, 0.3, 777};
  auto a = gen_geometric(spec);
  auto b = gen_geometric(spec);
  EXPECT_TRUE(a == b);
  ASSERT_TRUE(a.has_coords());
  for (int i = 0; i < a.n(); ++i) EXPECT_NEAR(a.coords()[i].norm(), 1.0, 1e-12);
}

TEST(GenGeometric, EdgeDensityMatchesCapMeasure) {
  const double gamma = 0.4;
  const int d = 3, n = 50;
  double mu = cap_measure(gamma, d);
  long edges = 0, pairs = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = gen_geometric({n, d, gamma, seed});
    edges += static_cast<long>(g.edge_count());
    pairs += n * (n - 1) / 2;
  }
  double rate = static_cast<double>(edges) / pairs;
  double sigma = std::sqrt(mu * (1 - mu) / pairs);  // pair correlations are weak
  EXPECT_NEAR(rate, mu, 6 * sigma);
}

TEST(CapMeasure, ArcFractionInDimensionTwo) {
  // d=2 oracle: the cap <u,v> <= 2g-1 is an arc of angle pi - arccos(2g-1)
  for (double gamma : {0.2, 0.5, 0.8}) {
    double oracle = (std::numbers::pi - std::acos(2 * gamma - 1)) / std::numbers::pi;
    EXPECT_NEAR(cap_measure(gamma, 2), oracle, 1e-9);
  }
}

TEST(CapMeasure, MonteCarloAgreement) {
  // 10 (gamma,d) pairs, 10^6 samples each is slow at desk scale; batch a
  // single stream of directions per dimension and reuse it across gammas.
  const int samples = 1000000;
  const std::vector<std::pair<double, int>> cases = {
      {0.1, 2}, {0.3, 2}, {0.5, 2}, {0.7, 3}, {0.2, 3},
      {0.5, 3}, {0.4, 4}, {0.6, 5}, {0.5, 6}, {0.9, 4}};
  for (int d : {2, 3, 4, 5, 6}) {
    Rng rng(derive_seed(99, d));
    std::vector<double> inner(samples);
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd v = random_unit_vector(rng, d);
      inner[s] = v(0);  // against u = e_0
    }
    for (const auto& [gamma, dd] : cases) {
      if (dd != d) continue;
      double mu = cap_measure(gamma, d);
      long hits = 0;
      for (double t : inner)
        if (t <= 2 * gamma - 1) ++hits;
      double rate = static_cast<double>(hits) / samples;
      double sigma = std::sqrt(mu * (1 - mu) / samples);
      EXPECT_NEAR(rate, mu, 3.5 * sigma) << "gamma=" << gamma << " d=" << d;
    }
  }
}

TEST(CapMeasure, MonotoneInGamma) {
  for (int d : {2, 3, 5}) {
    double prev = 0.0;
    for (double gamma = 0.1; gamma < 1.0; gamma += 0.1) {
      double mu = cap_measure(gamma, d);
      EXPECT_GT(mu, prev);
      prev = mu;
    }
  }
}

TEST(CapMeasure, TendsToOneAsGammaApproachesOne) {
  // threshold <u,v> <= 2g-1 -> 1, which covers the whole sphere
  for (int d : {2, 3, 6}) EXPECT_GT(cap_measure(0.999999, d), 0.995);
}

TEST(CapMeasure, DomainErrors) {
  EXPECT_THROW(cap_measure(0.0, 3), std::domain_error);
  EXPECT_THROW(cap_measure(1.0, 3), std::domain_error);
  EXPECT_THROW(cap_measure(0.5, 1), std::domain_error);
}

TEST(GenGnp, CompleteAtPOne) {
  auto g = gen_gnp(8, 1.0, 3);
  EXPECT_EQ(g.edge_count(), 28u);
}

TEST(GenGnp, ExpectedEdgeCount) {
  // n=100, p=0.1: mean 495, sd ~21; averaged over 20 seeds sd ~4.7
  double total = 0;
  for (std::uint64_t s = 0; s < 20; ++s) total += gen_gnp(100, 0.1, s).edge_count();
  EXPECT_NEAR(total / 20, 495.0, 4.0 * 21.1 / std::sqrt(20.0));
}

TEST(GenGnp, Deterministic) {
  EXPECT_TRUE(gen_gnp(30, 0.2, 5) == gen_gnp(30, 0.2, 5));
}

TEST(MaxcutAsUniqueGame, SingleEdgeSatisfiable) {
  auto game = maxcut_as_unique_game(normalize(2, {{0, 1, 1.0}}));
  double best = 1.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) best = std::min(best, game.violation({a, b}));
  EXPECT_DOUBLE_EQ(best, 0.0);
}

TEST(MaxcutAsUniqueGame, OddCycleParity) {
  for (int k : {3, 5}) {
    auto game = maxcut_as_unique_game(cycle_graph(k));
    double best = 1.0;
    for (int m = 0; m < (1 << k); ++m) {
      std::vector<int> x(k);
      for (int i = 0; i < k; ++i) x[i] = (m >> i) & 1;
      best = std::min(best, game.violation(x));
    }
    EXPECT_NEAR(best, 1.0 / k, 1e-12);
  }
}

TEST(MaxcutAsUniqueGame, RoundTripExact) {
  auto g = gen_gnp(10, 0.4, 21);
  auto game = maxcut_as_unique_game(g);
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> x(g.n());
    for (auto& xi : x) xi = static_cast<int>(rng.next_below(2));
    EXPECT_DOUBLE_EQ(g.cut_value(x) + game.violation(x), 1.0);
  }
}

TEST(BruteForce, TriangleMaxCut) {
  auto res = brute_force_opt(maxcut_csp(cycle_graph(3)));
  EXPECT_NEAR(res.value, 2.0 / 3.0, 1e-12);
  // lexicographically smallest maximizer
  EXPECT_EQ(res.witness, (Assignment{0, 0, 1}));
}

TEST(BruteForce, ConstantPayoff) {
  // single constraint with constant table 0.5: the normalized value is
  // P(x)/|P| = 0.5/0.5 = 1 for every assignment
  CspInstance csp(2, 2, 2, {{{0, 1}, {0.5, 0.5, 0.5, 0.5}}});
  auto res = brute_force_opt(csp);
  EXPECT_NEAR(res.value, 1.0, 1e-12);
  EXPECT_EQ(res.witness, (Assignment{0, 0}));
}

TEST(BruteForce, MatchesIndependentEnumeration) {
  auto csp = random_2csp(10, 25, 1234);
  auto res = brute_force_opt(csp);
  Assignment x(10, 0), witness;
  double best = -1e100;
  enumerate_reverse(csp, x, 9, best, witness);
  EXPECT_NEAR(res.value, best, 1e-10);
  EXPECT_NEAR(evaluate(csp, res.witness), res.value, 1e-10);
}

TEST(BruteForce, FastSharedTablePathMatchesGeneric) {
  auto g = gen_regular(22, 6, 77);
  auto csp = maxcut_csp(g, /*unit_payoffs=*/true);
  auto fast = brute_force_opt(csp, 1e9);  // n=22 engages the popcount path
  // oracle: independent sign enumeration over the graph itself
  double exact = brute_force_maxcut(g);
  EXPECT_NEAR(fast.value, exact, 1e-9);
  EXPECT_NEAR(g.cut_value(fast.witness), exact, 1e-12);
}

TEST(BruteForce, DominatesRandomAssignments) {
  auto csp = random_2csp(12, 30, 555);
  auto res = brute_force_opt(csp);
  Rng rng(999);
  for (int t = 0; t < 100; ++t) {
    Assignment x(12);
    for (auto& xi : x) xi = static_cast<int>(rng.next_below(2));
    EXPECT_GE(res.value + 1e-12, evaluate(csp, x));
  }
}

TEST(BruteForce, CapExceeded) {
  CspInstance csp(30, 2, 2, {{{0, 1}, {0, 1, 1, 0}}});
  try {
    brute_force_opt(csp, 1 << 20);
    FAIL() << "expected cap error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds cap"), std::string::npos);
  }
}

TEST(Evaluate, AllOnesPayoff) {
  CspInstance csp(3, 2, 2, {{{0, 1}, {1, 1, 1, 1}}, {{1, 2}, {1, 1, 1, 1}}});
  EXPECT_DOUBLE_EQ(evaluate(csp, {0, 1, 0}), 1.0);
}

TEST(Evaluate, ZeroTablesWithExplicitDenominator) {
  CspInstance csp(2, 2, 2, {{{0, 1}, {0, 0, 0, 0}}, {{0, 1}, {0, 1, 1, 0}}});
  EXPECT_DOUBLE_EQ(evaluate(csp, {0, 0}), 0.0);
}

TEST(Evaluate, TriangleMaxCutAssignment) {
  EXPECT_NEAR(evaluate(maxcut_csp(cycle_graph(3)), {0, 0, 1}), 2.0 / 3.0, 1e-12);
}

TEST(Evaluate, RejectsOutOfRangeSymbol) {
  auto csp = maxcut_csp(cycle_graph(3));
  EXPECT_THROW(evaluate(csp, {0, 0, 2}), std::invalid_argument);
  EXPECT_THROW(evaluate(csp, {0, 0}), std::invalid_argument);
}

TEST(Density, RegularMaxCut) {
  const int delta = 6;
  auto csp = maxcut_csp(gen_regular(20, delta, 9), /*unit_payoffs=*/true);
  auto rep = density(csp);
  EXPECT_DOUBLE_EQ(rep.delta_min, delta);
  EXPECT_DOUBLE_EQ(rep.delta_max, delta);
}

TEST(Density, StarGraph) {
  std::vector<Edge> edges;
  for (int leaf = 1; leaf <= 5; ++leaf) edges.push_back({0, leaf, 1.0});
  auto csp = maxcut_csp(normalize(6, std::move(edges)), /*unit_payoffs=*/true);
  auto rep = density(csp);
  EXPECT_DOUBLE_EQ(rep.delta_min, 1.0);
  EXPECT_DOUBLE_EQ(rep.delta_max, 5.0);
}

TEST(Density, GeometricRatioFinite) {
  auto g = gen_geometric({60, 3, 0.5, 31});
  auto rep = density(maxcut_csp(g, /*unit_payoffs=*/true));
  EXPECT_GT(rep.delta_min, 0.0);
  EXPECT_TRUE(std::isfinite(rep.ratio()));
}

TEST(UniqueGame, PermValidation) {
  EXPECT_THROW(UniqueGame(2, 2, {{0, 1, 1.0, {0, 0}}}), std::invalid_argument);
  EXPECT_THROW(UniqueGame(2, 2, {{0, 0, 1.0, {0, 1}}}), std::invalid_argument);
}

TEST(UniqueGame, InverseConsistency) {
  UniqueGame game(3, 3, {{0, 1, 0.5, {1, 2, 0}}, {1, 2, 0.5, {2, 0, 1}}});
  auto pi = game.perm(0, 1);
  auto pi_rev = game.perm(1, 0);
  EXPECT_EQ(compose_perm(pi_rev, pi), (std::vector<int>{0, 1, 2}));
}

TEST(UniqueGame, InducedRestriction) {
  auto game = maxcut_as_unique_game(cycle_graph(5));
  auto sub = game.induced({0, 1, 2});
  EXPECT_EQ(sub.n(), 3);
  EXPECT_EQ(sub.constraints().size(), 2u);  // edges 01, 12 survive
  double total = 0;
  for (const auto& c : sub.constraints()) total += c.w;
  EXPECT_NEAR(total, 1.0, 1e-12);
}
