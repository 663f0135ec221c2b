// Random geometric graphs on the unit sphere: n i.i.d. uniform unit vectors,
// edge (u,v) iff 1/4 ||u-v||^2 >= 1-gamma, i.e. <u,v> <= 2*gamma - 1.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "relax/graph.hpp"
#include "relax/rng.hpp"

namespace relax {

struct GeometricSpec {
  int n = 0;
  int d = 2;
  double gamma = 0.5;
  std::uint64_t seed = 0;
};

struct EmptyGeometricGraph : std::runtime_error {
  explicit EmptyGeometricGraph(const GeometricSpec& s)
      : std::runtime_error("empty geometric graph (n=" + std::to_string(s.n) +
                           ", d=" + std::to_string(s.d) +
                           ", gamma=" + std::to_string(s.gamma) + ")"),
        spec(s) {}
  GeometricSpec spec;
};

inline Eigen::VectorXd random_unit_vector(Rng& rng, int d) {
  Eigen::VectorXd v(d);
  for (;;) {
    for (int i = 0; i < d; ++i) v(i) = rng.next_gaussian();
    double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

inline std::vector<Eigen::VectorXd> sample_unit_vectors(int n, int d, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x53'50'48));
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back(random_unit_vector(rng, d));
  return pts;
}

inline double edge_level(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return 0.25 * (u - v).squaredNorm();
}

inline NormalizedGraph gen_geometric(const GeometricSpec& spec) {
  if (spec.gamma <= 0.0 || spec.gamma >= 1.0) throw std::invalid_argument("gamma must be in (0,1)");
  if (spec.d < 2) throw std::invalid_argument("d must be >= 2");
  auto pts = sample_unit_vectors(spec.n, spec.d, spec.seed);
  std::vector<Edge> edges;
  for (int i = 0; i < spec.n; ++i)
    for (int j = i + 1; j < spec.n; ++j)
      if (edge_level(pts[i], pts[j]) >= 1.0 - spec.gamma) edges.push_back({i, j, 1.0});
  if (edges.empty()) throw EmptyGeometricGraph(spec);
  return normalize(spec.n, std::move(edges), std::move(pts));
}

// mu(gamma,d): probability that a uniform v on S^{d-1} has <u,v> <= 2*gamma-1
// for fixed unit u. Computed as the normalized integral of sin^{d-2}(theta)
// over theta in [arccos(2*gamma-1), pi]; composite Simpson on the smooth
// integrand, deterministic to well below 1e-9.
inline double cap_measure(double gamma, int d) {
  if (gamma <= 0.0 || gamma >= 1.0) throw std::domain_error("gamma must be in (0,1)");
  if (d < 2) throw std::domain_error("d must be >= 2");
  const double pi = std::numbers::pi;
  auto integrand = [d](double theta) { return std::pow(std::sin(theta), d - 2); };
  auto simpson = [&](double a, double b) {
    const int segments = 1 << 14;  // smooth integrand; error ~ (b-a)^5/N^4
    const double h = (b - a) / segments;
    double s = integrand(a) + integrand(b);
    for (int i = 1; i < segments; ++i) s += integrand(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  const double theta0 = std::acos(2.0 * gamma - 1.0);
  return simpson(theta0, pi) / simpson(0.0, pi);
}

}  // namespace relax
