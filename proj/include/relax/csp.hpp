// Max-kCSP instances: payoff constraints over [q]-valued variables, value of
// an assignment x is (1/|P_total|) * sum_c P_c(x) where |P_total| is the sum
// of per-constraint sup norms. Subsampled instances keep the denominator of
// the instance they came from.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "relax/graph.hpp"

namespace relax {

using Assignment = std::vector<int>;

struct Constraint {
  std::vector<int> scope;    // k distinct variable ids, ordered
  std::vector<double> table; // q^k payoffs, row-major in scope order
};

inline double constraint_norm(const Constraint& c) {
  double m = 0.0;
  for (double t : c.table) m = std::max(m, std::abs(t));
  return m;
}

class CspInstance {
 public:
  static constexpr int kMaxArity = 4;
  static constexpr int kMaxAlphabet = 16;

  CspInstance() = default;
  // allow_scaled permits sup norms above 1 (subsampled instances scale
  // payoffs by delta^-k).
  CspInstance(int n, int q, int k, std::vector<Constraint> constraints,
              bool allow_scaled = false, double norm_denominator = -1.0)
      : n_(n), q_(q), k_(k), constraints_(std::move(constraints)) {
    if (q_ < 2 || q_ > kMaxAlphabet) throw std::invalid_argument("alphabet size out of range");
    if (k_ < 1 || k_ > kMaxArity) throw std::invalid_argument("arity out of range");
    std::size_t table_size = 1;
    for (int i = 0; i < k_; ++i) table_size *= q_;
    double total = 0.0;
    for (const auto& c : constraints_) {
      if (static_cast<int>(c.scope.size()) != k_) throw std::invalid_argument("scope arity mismatch");
      for (std::size_t a = 0; a < c.scope.size(); ++a) {
        if (c.scope[a] < 0 || c.scope[a] >= n_) throw std::invalid_argument("scope var out of range");
        for (std::size_t b = a + 1; b < c.scope.size(); ++b)
          if (c.scope[a] == c.scope[b]) throw std::invalid_argument("scope vars must be distinct");
      }
      if (c.table.size() != table_size) throw std::invalid_argument("table size mismatch");
      double norm = constraint_norm(c);
      if (!allow_scaled && norm > 1.0 + 1e-9)
        throw std::invalid_argument("constraint norm exceeds 1");
      total += norm;
    }
    if (!constraints_.empty() && total <= 0.0)
      throw std::invalid_argument("total constraint norm must be positive");
    own_norm_ = total;
    denom_ = norm_denominator > 0.0 ? norm_denominator : total;
  }

  int n() const { return n_; }
  int q() const { return q_; }
  int k() const { return k_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  double total_norm() const { return own_norm_; }
  double norm_denominator() const { return denom_; }

  std::size_t table_index(const Constraint& c, const Assignment& x) const {
    std::size_t idx = 0;
    for (int r = 0; r < k_; ++r) idx = idx * q_ + static_cast<std::size_t>(x[c.scope[r]]);
    return idx;
  }

 private:
  int n_ = 0;
  int q_ = 2;
  int k_ = 2;
  std::vector<Constraint> constraints_;
  double own_norm_ = 0.0;
  double denom_ = 1.0;
};

inline double evaluate(const CspInstance& csp, const Assignment& x) {
  if (static_cast<int>(x.size()) != csp.n()) throw std::invalid_argument("assignment length mismatch");
  for (int v : x)
    if (v < 0 || v >= csp.q()) throw std::invalid_argument("assignment symbol out of range");
  double s = 0.0;
  for (const auto& c : csp.constraints()) s += c.table[csp.table_index(c, x)];
  return s / csp.norm_denominator();
}

// Max-cut instance of a normalized graph as a 2-CSP: one constraint per edge
// paying w on disagreement. |P_total| equals the total edge weight.
inline CspInstance maxcut_csp(const NormalizedGraph& g, bool unit_payoffs = false) {
  std::vector<Constraint> cs;
  cs.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    double w = unit_payoffs ? 1.0 : e.w;
    cs.push_back({{e.u, e.v}, {0.0, w, w, 0.0}});
  }
  return CspInstance(g.n(), 2, 2, std::move(cs));
}

struct BruteForceResult {
  double value = 0.0;
  Assignment witness;
};

namespace detail {

// Lexicographic odometer enumeration with incremental constraint-index
// maintenance; first strict improvement yields the lex-smallest maximizer.
inline BruteForceResult brute_force_lex(const CspInstance& csp) {
  const int n = csp.n(), q = csp.q(), k = csp.k();
  const auto& cons = csp.constraints();
  std::vector<std::vector<std::pair<int, std::size_t>>> touching(n);  // (constraint, place value)
  std::vector<std::size_t> idx(cons.size(), 0);
  for (std::size_t ci = 0; ci < cons.size(); ++ci) {
    std::size_t place = 1;
    for (int r = k - 1; r >= 0; --r) {
      touching[cons[ci].scope[r]].push_back({static_cast<int>(ci), place});
      place *= q;
    }
  }
  Assignment x(n, 0);
  double val = 0.0;
  for (const auto& c : cons) val += c.table[0];
  auto exact_val = [&](const Assignment& a) {
    double s = 0.0;
    for (const auto& c : cons) s += c.table[csp.table_index(c, a)];
    return s;
  };
  double best = val;
  Assignment best_x = x;
  const double tie_eps = 1e-11 * (1.0 + std::abs(val));
  std::uint64_t steps = 0;
  for (;;) {
    // advance odometer (most significant digit = x[0], so lex order)
    int pos = n - 1;
    while (pos >= 0 && x[pos] == q - 1) {
      for (auto [ci, place] : touching[pos]) {
        val -= cons[ci].table[idx[ci]];
        idx[ci] -= place * (q - 1);
        val += cons[ci].table[idx[ci]];
      }
      x[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    for (auto [ci, place] : touching[pos]) {
      val -= cons[ci].table[idx[ci]];
      idx[ci] += place;
      val += cons[ci].table[idx[ci]];
    }
    x[pos] += 1;
    if (val > best + tie_eps) {
      best = val;
      best_x = x;
    } else if (val > best - tie_eps) {
      double ev = exact_val(x), eb = exact_val(best_x);
      if (ev > eb) { best = val; best_x = x; }
    }
    if ((++steps & 0xfffff) == 0) val = exact_val(x);  // kill float drift
  }
  return {best / csp.norm_denominator(), best_x};
}

// Gray-code enumeration for 2-CSPs over {0,1} whose constraints all share one
// payoff table: the quadratic coefficient is then a single scalar and the
// neighbor sum reduces to a popcount against a bitmask. Handles n <= 64.
inline BruteForceResult brute_force_shared_q2(const CspInstance& csp) {
  const int n = csp.n();
  const auto& cons = csp.constraints();
  const auto& t = cons.front().table;  // shared
  const double t00 = t[0], t01 = t[1], t10 = t[2], t11 = t[3];
  const double delta = t11 - t10 - t01 + t00;
  const bool flip_symmetric = (t00 == t11 && t01 == t10);
  std::vector<double> beta(n, 0.0);
  std::vector<std::uint64_t> mask(n, 0);
  double base = 0.0;
  for (const auto& c : cons) {
    base += t00;
    beta[c.scope[0]] += t10 - t00;
    beta[c.scope[1]] += t01 - t00;
    mask[c.scope[0]] |= 1ULL << c.scope[1];
    mask[c.scope[1]] |= 1ULL << c.scope[0];
  }
  const int bits = flip_symmetric ? n - 1 : n;
  std::uint64_t xbits = 0;
  double val = base;
  auto exact_val = [&](std::uint64_t xb) {
    double s = 0.0;
    for (const auto& c : cons) {
      int a = static_cast<int>((xb >> c.scope[0]) & 1);
      int b = static_cast<int>((xb >> c.scope[1]) & 1);
      s += t[static_cast<std::size_t>(a) * 2 + b];
    }
    return s;
  };
  auto lex_canonical = [&](std::uint64_t xb) {
    // among {x, complement(x)} (equal value when flip symmetric), keep the
    // one whose first coordinate is 0
    if (flip_symmetric && (xb & 1ULL)) xb = ~xb & ((n == 64) ? ~0ULL : ((1ULL << n) - 1));
    return xb;
  };
  auto lex_less = [n](std::uint64_t a, std::uint64_t b) {
    for (int i = 0; i < n; ++i) {
      int ai = static_cast<int>((a >> i) & 1), bi = static_cast<int>((b >> i) & 1);
      if (ai != bi) return ai < bi;
    }
    return false;
  };
  double best = val;
  std::uint64_t best_x = lex_canonical(xbits);
  const double tie_eps = 1e-11 * (1.0 + std::abs(base) + csp.total_norm());
  const std::uint64_t total = bits >= 64 ? 0 : (1ULL << bits);
  for (std::uint64_t m = 1; m != total; ++m) {
    const int i = std::countr_zero(m);
    const double nb = delta * static_cast<double>(std::popcount(mask[i] & xbits));
    xbits ^= 1ULL << i;
    val += (xbits >> i) & 1 ? (beta[i] + nb) : -(beta[i] + nb);
    if (val > best + tie_eps) {
      best = val;
      best_x = lex_canonical(xbits);
    } else if (val > best - tie_eps) {
      std::uint64_t cand = lex_canonical(xbits);
      double ev = exact_val(cand), eb = exact_val(best_x);
      if (ev > eb + 1e-13 || (std::abs(ev - eb) <= 1e-13 && lex_less(cand, best_x))) {
        best = val;
        best_x = cand;
      }
    }
    if ((m & 0x3ffffff) == 0) val = exact_val(xbits);
  }
  Assignment w(n, 0);
  for (int i = 0; i < n; ++i) w[i] = static_cast<int>((best_x >> i) & 1);
  return {exact_val(best_x) / csp.norm_denominator(), w};
}

}  // namespace detail

// Exact optimum and the lexicographically smallest maximizing assignment.
// cap guards the search-space size q^n.
inline BruteForceResult brute_force_opt(const CspInstance& csp, double cap = double(1 << 24)) {
  double space = std::pow(static_cast<double>(csp.q()), csp.n());
  if (space > cap)
    throw std::invalid_argument("brute_force_opt: q^n = " + std::to_string(space) +
                                " exceeds cap " + std::to_string(cap));
  if (csp.constraints().empty()) return {0.0, Assignment(csp.n(), 0)};
  if (csp.q() == 2 && csp.k() == 2 && csp.n() <= 64 && csp.n() > 20) {
    const auto& cons = csp.constraints();
    bool shared = true;
    for (const auto& c : cons)
      if (c.table != cons.front().table) { shared = false; break; }
    if (shared) return detail::brute_force_shared_q2(csp);
  }
  return detail::brute_force_lex(csp);
}

// (delta_min, delta_max) of the per-fixing constraint mass: over all scope
// positions r and all fixings of the other k-1 positions occurring in the
// instance, the total sup norm of matching constraints.
struct DensityReport {
  double delta_min = 0.0;
  double delta_max = 0.0;
  double ratio() const { return delta_min > 0.0 ? std::sqrt(delta_max / delta_min) : 0.0; }
};

inline DensityReport density(const CspInstance& csp) {
  // Key: the k-1 fixed scope variables as an unordered set; masses aggregate
  // over the free position so that a Delta-regular max-cut instance reports
  // delta_min = delta_max = Delta regardless of scope orientation.
  std::map<std::vector<int>, double> mass;
  for (const auto& c : csp.constraints()) {
    double norm = constraint_norm(c);
    for (int r = 0; r < csp.k(); ++r) {
      std::vector<int> key;
      for (int s = 0; s < csp.k(); ++s)
        if (s != r) key.push_back(c.scope[s]);
      std::sort(key.begin(), key.end());
      mass[key] += norm;
    }
  }
  if (mass.empty()) return {};
  DensityReport rep{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& [key, m] : mass) {
    rep.delta_min = std::min(rep.delta_min, m);
    rep.delta_max = std::max(rep.delta_max, m);
  }
  return rep;
}

}  // namespace relax
