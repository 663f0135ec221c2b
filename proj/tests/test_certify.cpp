#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "relax/certify.hpp"

using namespace relax;

namespace {

double cycle_edge_level_max_err(const std::vector<Eigen::VectorXd>& cycle, double l) {
  double err = 0.0;
  const int k = static_cast<int>(cycle.size());
  for (int i = 0; i < k; ++i)
    err = std::max(err, std::abs(edge_level(cycle[i], cycle[(i + 1) % k]) - l));
  return err;
}

}  // namespace

TEST(OddCycle, LevelsExactWithinTolerance) {
  for (double gamma : {0.04, 0.1, 0.3}) {
    for (double l : {1.0 - gamma, 1.0 - 0.75 * gamma, 1.0 - 0.5 * gamma}) {
      auto cycle = odd_cycle_at_level(4, gamma, l);
      ASSERT_GE(cycle.size(), 3u);
      EXPECT_EQ(cycle.size() % 2, 1u);
      EXPECT_LE(cycle_edge_level_max_err(cycle, l), 1e-9);
      for (const auto& v : cycle) EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    }
  }
}

TEST(OddCycle, LengthBound) {
  for (double gamma : {0.01, 0.04, 0.1}) {
    for (double l : {1.0 - gamma, 1.0 - 0.6 * gamma}) {
      auto cycle = odd_cycle_at_level(3, gamma, l);
      EXPECT_LE(cycle.size(), 10.0 * std::numbers::pi / std::sqrt(gamma))
          << "gamma=" << gamma << " l=" << l;
    }
  }
}

TEST(OddCycle, BestCutMissesOneEdge) {
  auto cycle = odd_cycle_at_level(3, 0.1, 0.93);
  const int k = static_cast<int>(cycle.size());
  std::vector<Edge> edges;
  for (int i = 0; i < k; ++i) edges.push_back({i, (i + 1) % k, 1.0});
  auto g = normalize(k, std::move(edges));
  EXPECT_NEAR(brute_force_maxcut(g), 1.0 - 1.0 / k, 1e-12);
}

TEST(OddCycle, RotationCovariant) {
  auto cycle = odd_cycle_at_level(4, 0.1, 0.92);
  Rng rng(3);
  auto rot = haar_rotation(4, rng);
  auto rebuilt = odd_cycle_at_level(4, 0.1, 0.92);
  for (std::size_t i = 0; i < cycle.size(); ++i)
    EXPECT_NEAR((rot * cycle[i] - rot * rebuilt[i]).norm(), 0.0, 1e-9);
}

TEST(OddCycle, DomainErrors) {
  EXPECT_THROW(odd_cycle_at_level(2, 0.1, 0.95), std::invalid_argument);
  EXPECT_THROW(odd_cycle_at_level(3, 0.1, 0.5), std::invalid_argument);
}

TEST(CycleCover, FailureRateTracksLevelDistribution) {
  GeometricSpec spec{120, 7, 0.2, 11};
  auto g = gen_geometric(spec);
  long over = 0;
  for (const auto& e : g.edges())
    if (edge_level(g.coords()[e.u], g.coords()[e.v]) > 1.0 - spec.gamma / 2) ++over;
  double frac = static_cast<double>(over) / g.edge_count();
  auto cover = sample_cycle_cover(spec, 400);
  double observed = static_cast<double>(cover.failures) / cover.attempts;
  double sigma = std::sqrt(std::max(frac * (1 - frac), 1e-4) / cover.attempts);
  EXPECT_NEAR(observed, frac, 4 * sigma + 0.02);
}

TEST(CycleCover, SnappedCyclesRespectLevelWithinSnapRadius) {
  GeometricSpec spec{150, 5, 0.25, 7};
  auto g = gen_geometric(spec);
  auto cover = sample_cycle_cover(spec, 40);
  for (const auto& sc : cover.cycles) {
    const int k = static_cast<int>(sc.vertices.size());
    for (int i = 0; i < k; ++i) {
      int j = (i + 1) % k;
      double ru = sc.snap_distance[i], rv = sc.snap_distance[j];
      double chord = (sc.points[i] - sc.points[j]).norm();
      double lo = std::max(0.0, chord - ru - rv), hi = chord + ru + rv;
      double snapped =
          edge_level(g.coords()[sc.vertices[i]], g.coords()[sc.vertices[j]]);
      EXPECT_GE(snapped, 0.25 * lo * lo - 1e-9);
      EXPECT_LE(snapped, 0.25 * hi * hi + 1e-9);
    }
  }
}

TEST(CycleCover, FailureRateDecreasingInDimension) {
  // level concentration: the failure branch fires less often as d grows
  double prev = 1.0;
  for (int d : {4, 6, 8}) {
    auto cov = sample_cycle_cover({80, d, 0.25, 3}, 4000);
    double rate = static_cast<double>(cov.failures) / cov.attempts;
    EXPECT_LT(rate, prev);
    prev = rate;
  }
}

TEST(CycleCover, MarginalTvDecreasingInGraphSize) {
  // denser discretizations snap the rotated cycles onto graph edges more
  // faithfully; sampling density per edge is held fixed
  auto coarse_g = gen_geometric({60, 4, 0.25, 3});
  auto coarse = sample_cycle_cover({60, 4, 0.25, 3}, 20 * int(coarse_g.edge_count()));
  auto fine_g = gen_geometric({240, 4, 0.25, 3});
  auto fine = sample_cycle_cover({240, 4, 0.25, 3}, 20 * int(fine_g.edge_count()));
  EXPECT_LT(fine.marginal_tv_to_uniform, coarse.marginal_tv_to_uniform);
}

TEST(CycleCover, LowDimensionFailureRateErrors) {
  // at d=3 the edge level is uniform, so half the draws fail and the cover
  // construction reports the concentration-regime error
  EXPECT_THROW(sample_cycle_cover({60, 3, 0.25, 3}, 2000), std::runtime_error);
}

TEST(Certify, UpperBoundsHemisphereAndBruteForce) {
  GeometricSpec spec{22, 4, 0.25, 19};
  auto cert = certify_geometric_maxcut(spec, {.tol = 1e-5});
  auto g = gen_geometric(spec);
  auto hemi = hemisphere_cut(g);
  EXPECT_GE(cert.upper_bound + 1e-6, hemi.first_coordinate_cut);
  EXPECT_GE(cert.upper_bound + 1e-6, hemi.best_random_cut);
  EXPECT_GE(cert.upper_bound + 2e-4, brute_force_maxcut(g));
  EXPECT_GE(cert.gw_baseline, 1.0 - spec.gamma - 1e-3);
  EXPECT_EQ(cert.graph_sha.size(), 64u);
}

TEST(Certify, CertificateNeverBelowExactOptimum) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    GeometricSpec spec{18, 3, 0.35, seed};
    auto cert = certify_geometric_maxcut(spec, {.tol = 1e-5});
    auto g = gen_geometric(spec);
    EXPECT_GE(cert.upper_bound + 2e-4, brute_force_maxcut(g)) << "seed " << seed;
  }
}

TEST(Hemisphere, TwoCapGraphIsBipartite) {
  // two tight caps around +-e_1: all edges cross, so the first-coordinate
  // hemisphere cuts everything
  std::vector<Eigen::VectorXd> pts;
  Rng rng(5);
  for (int i = 0; i < 12; ++i) {
    Eigen::VectorXd v(3);
    v << (i < 6 ? 1.0 : -1.0), 0.05 * rng.next_gaussian(), 0.05 * rng.next_gaussian();
    pts.push_back(v / v.norm());
  }
  std::vector<Edge> edges;
  for (int i = 0; i < 6; ++i)
    for (int j = 6; j < 12; ++j) edges.push_back({i, j, 1.0});
  auto g = normalize(12, std::move(edges), std::move(pts));
  auto hemi = hemisphere_cut(g);
  EXPECT_DOUBLE_EQ(hemi.first_coordinate_cut, 1.0);
}

TEST(Hemisphere, DecreasingInGamma) {
  double prev = 1.0;
  for (double gamma : {0.05, 0.2, 0.5}) {
    auto g = gen_geometric({400, 4, gamma, 23});
    auto hemi = hemisphere_cut(g);
    EXPECT_LT(hemi.first_coordinate_cut, prev + 0.02);
    prev = hemi.first_coordinate_cut;
  }
}

TEST(Hemisphere, NeverAboveBruteForce) {
  auto g = gen_geometric({20, 3, 0.3, 9});
  auto hemi = hemisphere_cut(g, 100, 4);
  EXPECT_LE(hemi.best_random_cut, brute_force_maxcut(g) + 1e-12);
}

TEST(GreedyExtend, SeedEqualsWholeSet) {
  auto g = gen_gnp(10, 0.5, 7);
  auto csp = maxcut_csp(g);
  std::vector<int> u(10);
  for (int i = 0; i < 10; ++i) u[i] = i;
  // one block covering U, seeded entirely
  Assignment y(10);
  Rng rng(3);
  for (auto& yi : y) yi = static_cast<int>(rng.next_below(2));
  auto z = greedy_extend(csp, u, {u}, {u}, y);
  EXPECT_EQ(z, y);
}

TEST(GreedyExtend, SingleBlockUniqueMaximizer) {
  // constraints pay only on one specific configuration of the free block
  std::vector<Constraint> cs;
  cs.push_back({{0, 2}, {0, 1, 0, 0}});  // wants x0=0, x2=1
  cs.push_back({{1, 2}, {0, 0, 0, 1}});  // wants x1=1, x2=1
  CspInstance csp(3, 2, 2, std::move(cs));
  std::vector<int> u{0, 1, 2};
  Assignment y(3, 0);
  y[0] = 0;
  y[1] = 1;
  auto z = greedy_extend(csp, u, {{0, 1, 2}}, {{0, 1}}, y);
  EXPECT_EQ(z[2], 1);
}

TEST(GreedyExtend, AgreesOnSeedAndApproachesOptimum) {
  auto g = gen_regular(24, 8, 15);
  auto csp = maxcut_csp(g);
  std::vector<int> u(24);
  for (int i = 0; i < 24; ++i) u[i] = i;
  auto opt = brute_force_opt(csp, 1 << 24);
  auto blocks = make_greedy_blocks(u, 4, 0.25, 5);
  // enumerate all seeds on S (|S| = 6 at alpha = 1/4), keep the best extension
  std::vector<int> s_all;
  for (const auto& sb : blocks.s_blocks) s_all.insert(s_all.end(), sb.begin(), sb.end());
  double best = 0.0;
  Assignment best_z;
  const std::uint64_t seeds = 1ULL << s_all.size();
  for (std::uint64_t m = 0; m < seeds; ++m) {
    Assignment y(24, 0);
    for (std::size_t i = 0; i < s_all.size(); ++i) y[s_all[i]] = (m >> i) & 1;
    auto z = greedy_extend(csp, u, blocks.u_blocks, blocks.s_blocks, y);
    for (std::size_t i = 0; i < s_all.size(); ++i) ASSERT_EQ(z[s_all[i]], y[s_all[i]]);
    double v = evaluate(csp, z);
    if (v > best) { best = v; best_z = z; }
  }
  EXPECT_GE(best, opt.value - 0.15);
}

TEST(PsdTester, ScaledIdentityAlwaysAccepted) {
  const int n = 200;
  const double d_bound = 1.0;
  auto oracle = [&](int i, int j) { return i == j ? d_bound / (n * n) : 0.0; };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto res = psd_tester(oracle, n, 1.0, d_bound, seed);
    EXPECT_TRUE(res.accepted);
  }
}

TEST(PsdTester, FarInstanceRejected) {
  const int n = 200;
  auto oracle = [&](int i, int j) { return -1.0 / (n * n); };  // -(D/n^2) * ones
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    if (!psd_tester(oracle, n, 1.0, 1.0, seed).accepted) ++rejects;
  EXPECT_GT(rejects, 66);
}

TEST(PsdTester, PsdInstanceRarelyRejected) {
  const int n = 150;
  // Gram matrix of random unit vectors, scaled to ||B||_inf <= D/n^2
  Rng rng(8);
  std::vector<Eigen::VectorXd> vs;
  for (int i = 0; i < n; ++i) vs.push_back(random_unit_vector(rng, 6));
  auto oracle = [&](int i, int j) { return vs[i].dot(vs[j]) / (n * n); };
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    if (!psd_tester(oracle, n, 1.0, 1.0, seed).accepted) ++rejects;
  EXPECT_LT(rejects, 34);
}

TEST(PsdTester, BoxMinimumSoundness) {
  // the box minimum can never undercut k * lambda_min of the sampled block
  const int n = 60;
  Rng rng(12);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = rng.next_gaussian() / (n * n);
  auto oracle = [&](int i, int j) { return m(i, j); };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto res = psd_tester(oracle, n, 2.0, 1.0, seed);
    Eigen::MatrixXd b(res.k, res.k);
    const double scale = double(n) / res.k * double(n) / res.k;
    for (int i = 0; i < res.k; ++i)
      for (int j = 0; j < res.k; ++j) b(i, j) = scale * m(res.sample[i], res.sample[j]);
    double lmin = min_eigenvalue(0.5 * (b + b.transpose())).first;
    if (lmin < 0) EXPECT_GE(res.box_min, res.k * lmin - 1e-9);
    else EXPECT_GE(res.box_min, -1e-9);
  }
}

TEST(PsdTester, SampleCapError) {
  auto oracle = [](int, int) { return 0.0; };
  EXPECT_THROW(psd_tester(oracle, 1000, 0.5, 1.0, 1), std::invalid_argument);
}
