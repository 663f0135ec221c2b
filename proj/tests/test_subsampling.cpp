#include <gtest/gtest.h>

#include <cmath>

#include "relax/csp.hpp"
#include "relax/graph.hpp"
#include "relax/subsample.hpp"

using namespace relax;

namespace {

CspInstance random_dense_2csp(int n, int m, std::uint64_t seed) {
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

// independent recount of the influence formula
std::vector<double> recount_influence(const CspInstance& csp) {
  std::vector<double> inf(csp.n(), 0.0);
  for (const auto& c : csp.constraints()) {
    double norm = 0.0;
    for (double t : c.table) norm = std::max(norm, std::abs(t));
    for (int v : c.scope) inf[v] += norm;
  }
  for (auto& f : inf) f /= csp.norm_denominator();
  return inf;
}

}  // namespace

TEST(VertexSubsample, DeltaOneIsIdentity) {
  auto csp = random_dense_2csp(12, 40, 3);
  auto sample = vertex_subsample(csp, 1.0, 99);
  ASSERT_EQ(sample.csp.constraints().size(), csp.constraints().size());
  for (std::size_t i = 0; i < csp.constraints().size(); ++i) {
    EXPECT_EQ(sample.csp.constraints()[i].scope, csp.constraints()[i].scope);
    EXPECT_EQ(sample.csp.constraints()[i].table, csp.constraints()[i].table);
  }
  EXPECT_DOUBLE_EQ(sample.realized_delta, 1.0);
}

TEST(VertexSubsample, SingleEdgeScaling) {
  auto g = normalize(4, {{0, 1, 1.0}});
  auto csp = maxcut_csp(g);
  // find a seed keeping exactly {0,1}
  for (std::uint64_t seed = 0;; ++seed) {
    auto s = vertex_subsample(csp, 0.5, seed);
    if (s.vertices == std::vector<int>{0, 1}) {
      ASSERT_EQ(s.csp.constraints().size(), 1u);
      EXPECT_DOUBLE_EQ(s.csp.constraints()[0].table[1], 4.0);  // w=1 times (1/2)^-2
      EXPECT_DOUBLE_EQ(s.csp.norm_denominator(), csp.norm_denominator());
      break;
    }
    ASSERT_LT(seed, 200u);
  }
}

TEST(VertexSubsample, SampleSmallerThanArityErrors) {
  auto csp = random_dense_2csp(10, 20, 4);
  EXPECT_THROW(vertex_subsample(csp, 0.1, 1), std::invalid_argument);
}

TEST(VertexSubsample, BernoulliUnbiasedEvaluation) {
  // E_U[P_U(x)] = P(x) holds exactly for Bernoulli vertex sampling; checked
  // to 4 standard errors over 2000 seeded samples.
  auto csp = random_dense_2csp(30, 120, 7);
  Rng rng(55);
  Assignment x(30);
  for (auto& xi : x) xi = static_cast<int>(rng.next_below(2));
  const double full = evaluate(csp, x);
  const int trials = 2000;
  std::vector<double> vals(trials);
  for (int t = 0; t < trials; ++t) {
    auto s = vertex_subsample(csp, 0.4, derive_seed(1000, t), SampleMode::Bernoulli);
    vals[t] = evaluate(s.csp, x);
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= trials;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  double sem = std::sqrt(var / (trials - 1)) / std::sqrt(double(trials));
  EXPECT_NEAR(mean, full, 4.0 * sem);
}

TEST(VertexSubsample, FixedSizeMatchesHypergeometricFactor) {
  // with |U| = delta*n exactly and realized-delta rescaling, the expectation
  // carries the hypergeometric factor n(u-1)/(u(n-1)) for k = 2
  auto csp = random_dense_2csp(30, 120, 8);
  Rng rng(56);
  Assignment x(30);
  for (auto& xi : x) xi = static_cast<int>(rng.next_below(2));
  const double full = evaluate(csp, x);
  const int n = 30, u = 15;
  const double factor = double(n) * (u - 1) / (double(u) * (n - 1));
  const int trials = 2000;
  double mean = 0.0, var = 0.0;
  std::vector<double> vals(trials);
  for (int t = 0; t < trials; ++t) {
    auto s = vertex_subsample(csp, 0.5, derive_seed(2000, t));
    vals[t] = evaluate(s.csp, x);
    mean += vals[t];
  }
  mean /= trials;
  for (double v : vals) var += (v - mean) * (v - mean);
  double sem = std::sqrt(var / (trials - 1)) / std::sqrt(double(trials));
  EXPECT_NEAR(mean, factor * full, 4.0 * sem);
}

TEST(VertexSubsampleGraph, DeltaOneSameGraph) {
  auto g = gen_gnp(14, 0.4, 9);
  auto s = vertex_subsample_graph(g, 1.0, 5);
  EXPECT_TRUE(s.graph == g);
}

TEST(VertexSubsampleGraph, CompleteTenToCompleteFive) {
  auto s = vertex_subsample_graph(complete_graph(10), 0.5, 17);
  EXPECT_EQ(s.graph.n(), 5);
  EXPECT_EQ(s.graph.edge_count(), 10u);
  for (const auto& e : s.graph.edges()) EXPECT_NEAR(e.w, 0.1, 1e-15);
}

TEST(VertexSubsampleGraph, TypicalInducedWeight) {
  const int n = 60, delta_deg = 20;
  const double delta = 0.5;
  auto g = gen_regular(n, delta_deg, 12);
  double mean_w = 0.0;
  long count = 0;
  for (std::uint64_t t = 0; t < 40; ++t) {
    auto s = vertex_subsample_graph(g, delta, derive_seed(31, t));
    for (const auto& e : s.graph.edges()) {
      mean_w += e.w;
      ++count;
    }
  }
  mean_w /= count;
  EXPECT_NEAR(mean_w, 2.0 / (delta * delta * delta_deg * n), 0.1 * mean_w);
}

TEST(VertexSubsampleGraph, NeverIntroducesEdges) {
  auto g = gen_gnp(20, 0.3, 2);
  auto s = vertex_subsample_graph(g, 0.6, 77);
  auto a_full = g.adjacency();
  for (const auto& e : s.graph.edges())
    EXPECT_GT(a_full(s.vertices[e.u], s.vertices[e.v]), 0.0);
}

TEST(EdgeSubsample, DeltaOneSameGraph) {
  auto g = gen_gnp(12, 0.5, 3);
  auto s = edge_subsample(g, 1.0, 4);
  EXPECT_TRUE(s.graph == g);
}

TEST(EdgeSubsample, DeterministicAndVertexPreserving) {
  auto g = gen_regular(20, 6, 5);
  auto a = edge_subsample(g, 0.5, 123);
  auto b = edge_subsample(g, 0.5, 123);
  EXPECT_TRUE(a.graph == b.graph);
  EXPECT_EQ(a.graph.n(), g.n());
  EXPECT_EQ(a.graph.edge_count(), g.edge_count() / 2);
}

TEST(Influence, RegularMaxCutUniform) {
  auto csp = maxcut_csp(gen_regular(20, 6, 8));
  auto prof = influence_profile(csp);
  for (double f : prof.influence) EXPECT_NEAR(f, prof.influence[0], 1e-12);
  double total = 0.0;
  for (double f : prof.influence) total += f;
  EXPECT_NEAR(total, 2.0, 1e-12);  // sum of influences = k
}

TEST(Influence, StarCenterFiveTimesLeaf) {
  std::vector<Edge> edges;
  for (int leaf = 1; leaf <= 5; ++leaf) edges.push_back({0, leaf, 1.0});
  auto csp = maxcut_csp(normalize(6, std::move(edges)));
  auto prof = influence_profile(csp);
  EXPECT_NEAR(prof.influence[0], 5.0 * prof.influence[1], 1e-12);
}

TEST(Influence, SubsampledProfileMatchesRecount) {
  auto csp = random_dense_2csp(24, 90, 10);
  auto s = vertex_subsample(csp, 0.5, 77);
  auto prof = influence_profile(s.csp);
  auto recount = recount_influence(s.csp);
  for (int i = 0; i < 24; ++i) EXPECT_NEAR(prof.influence[i], recount[i], 1e-12);
}

TEST(Prune, RegularAtTwoNKeepsEverything) {
  auto csp = maxcut_csp(gen_regular(20, 6, 8));
  auto prof = influence_profile(csp);
  auto res = prune(csp, prof.prune_threshold);
  EXPECT_EQ(res.csp.constraints().size(), csp.constraints().size());
  EXPECT_DOUBLE_EQ(res.removed_norm, 0.0);
}

TEST(Prune, StarBelowCenterInfluenceRemovesAll) {
  std::vector<Edge> edges;
  for (int leaf = 1; leaf <= 5; ++leaf) edges.push_back({0, leaf, 1.0});
  auto csp = maxcut_csp(normalize(6, std::move(edges)));
  auto prof = influence_profile(csp);
  auto res = prune(csp, 0.9 * prof.influence[0]);
  EXPECT_TRUE(res.emptied);
  EXPECT_NEAR(res.removed_norm, 1.0, 1e-12);
}

TEST(Prune, NeverLeavesInfluenceAboveThreshold) {
  auto csp = random_dense_2csp(20, 70, 13);
  auto prof = influence_profile(csp);
  double thresh = 1.2 * prof.mean;
  auto res = prune(csp, thresh);
  auto after = influence_profile(res.csp);
  for (double f : after.influence) EXPECT_LE(f, thresh + 1e-12);
}

TEST(Prune, SubsampledMassRemovedIsSmall) {
  // at delta*Delta = 15 the 2N pruning removes little mass on average
  auto g = gen_regular(60, 30, 21);
  auto csp = maxcut_csp(g);
  double removed = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    auto sub = vertex_subsample(csp, 0.5, derive_seed(400, s));
    auto prof = influence_profile(sub.csp);
    removed += prune(sub.csp, prof.prune_threshold).removed_norm;
  }
  EXPECT_LE(removed / seeds, 0.1);
}

TEST(DegreeConcentration, CompleteGraphDeltaOneHasNoDeviation) {
  auto rep = degree_concentration(complete_graph(12), 1.0, 5, 3);
  EXPECT_DOUBLE_EQ(rep.mean_abs_deviation, 0.0);
  for (const auto& pt : rep.tail) EXPECT_DOUBLE_EQ(pt.empirical, 0.0);
}

TEST(DegreeConcentration, FourthMomentTailBound) {
  auto g = gen_regular(100, 50, 6);
  auto rep = degree_concentration(g, 0.5, 10000, 11);
  ASSERT_EQ(rep.tail.size(), 2u);
  for (const auto& pt : rep.tail) EXPECT_LE(pt.empirical, pt.fourth_moment_bound);
}

TEST(DegreeConcentration, DeviationShrinksWithDeltaDelta) {
  auto g = gen_regular(80, 40, 6);
  auto lo = degree_concentration(g, 0.25, 400, 13);
  auto hi = degree_concentration(g, 0.5, 400, 13);
  EXPECT_LT(hi.mean_abs_deviation, 0.85 * lo.mean_abs_deviation);
}

TEST(Mcdiarmid, ClosedForm) {
  EXPECT_NEAR(mcdiarmid_bound({1, 1, 1, 1}, 2.0), 2.0 * std::exp(-2.0), 1e-12);
  EXPECT_NEAR(mcdiarmid_bound({1.0}, 1e-9), 2.0, 1e-6);  // vacuous as t -> 0
  EXPECT_THROW(mcdiarmid_bound({1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(mcdiarmid_bound({-1.0}, 1.0), std::invalid_argument);
}

TEST(Mcdiarmid, Monotonicity) {
  EXPECT_LT(mcdiarmid_bound({1, 1}, 2.0), mcdiarmid_bound({1, 1}, 1.0));
  EXPECT_GT(mcdiarmid_bound({2, 1}, 1.0), mcdiarmid_bound({1, 1}, 1.0));
}

TEST(Mcdiarmid, EmpiricalUniformSums) {
  // sum of m=100 uniforms on [0, 1/m]; each c_i = 1/m
  const int m = 100, runs = 100000;
  const double t = 0.1;
  std::vector<double> c(m, 1.0 / m);
  const double bound = mcdiarmid_bound(c, t);
  Rng rng(77);
  const double mean = 0.5;
  long exceed = 0;
  for (int r = 0; r < runs; ++r) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += rng.next_double() / m;
    if (std::abs(s - mean) > t) ++exceed;
  }
  EXPECT_LE(static_cast<double>(exceed) / runs, bound);
}
