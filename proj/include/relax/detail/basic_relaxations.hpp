// Implementation of basic_sdp_csp / basic_lp_csp declared in relaxations.hpp.
#pragma once

namespace relax {

namespace detail {

struct PairTermLayout {
  int xi = 0, xj = 0;  // Gram indices (variable*q + label)
};

// (slot_i, slot_j, a, b) consistency terms of one constraint, ordered pairs
// including the diagonal slot pairs ((kq)^2 terms total).
inline std::vector<PairTermLayout> pair_terms(const Constraint& c, int q) {
  std::vector<PairTermLayout> out;
  const int k = static_cast<int>(c.scope.size());
  for (int si = 0; si < k; ++si)
    for (int sj = 0; sj < k; ++sj)
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          out.push_back({c.scope[si] * q + a, c.scope[sj] * q + b});
  return out;
}

// marginal Pr_mu[x_{slot_i}=a, x_{slot_j}=b] for every term, given mu over
// [q]^k in row-major scope order
inline std::vector<double> pair_marginals(const Constraint& c, int q, const Eigen::VectorXd& mu) {
  const int k = static_cast<int>(c.scope.size());
  std::vector<double> digits(k);
  std::vector<double> marg(static_cast<std::size_t>(k) * k * q * q, 0.0);
  const int zn = static_cast<int>(mu.size());
  for (int z = 0; z < zn; ++z) {
    if (mu(z) == 0.0) continue;
    int rem = z;
    std::vector<int> dig(k);
    for (int rpos = k - 1; rpos >= 0; --rpos) {
      dig[rpos] = rem % q;
      rem /= q;
    }
    for (int si = 0; si < k; ++si)
      for (int sj = 0; sj < k; ++sj)
        marg[((static_cast<std::size_t>(si) * k + sj) * q + dig[si]) * q + dig[sj]] += mu(z);
  }
  return marg;
}

// Exact LP over (mu, slack) maximizing payoff/den - w_pen * sum |marg - x|.
inline Eigen::VectorXd optimal_local_distribution(const Constraint& c, int q, double den,
                                                  double w_pen, const Eigen::MatrixXd& x,
                                                  double* payoff_out = nullptr) {
  const int k = static_cast<int>(c.scope.size());
  const int zn = static_cast<int>(c.table.size());
  auto terms = pair_terms(c, q);
  const int nterms = static_cast<int>(terms.size());
  const int nvars = zn + nterms;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(nvars);
  for (int z = 0; z < zn; ++z) obj(z) = c.table[z] / den;
  for (int t = 0; t < nterms; ++t) obj(zn + t) = -w_pen;
  std::vector<LpRow> rows;
  LpRow sum_row;
  for (int z = 0; z < zn; ++z) sum_row.terms.push_back({z, 1.0});
  sum_row.sense = '=';
  sum_row.rhs = 1.0;
  rows.push_back(std::move(sum_row));
  // which z hit term t: digit(si) == a && digit(sj) == b
  for (int t = 0; t < nterms; ++t) {
    const int si = t / (k * q * q);
    const int sj = (t / (q * q)) % k;
    const int a = (t / q) % q;
    const int b = t % q;
    LpRow up, dn;
    for (int z = 0; z < zn; ++z) {
      int rem = z;
      int dig_sj = -1, dig_si = -1;
      for (int rpos = k - 1; rpos >= 0; --rpos) {
        int d = rem % q;
        rem /= q;
        if (rpos == si) dig_si = d;
        if (rpos == sj) dig_sj = d;
      }
      if (dig_si == a && dig_sj == b) {
        up.terms.push_back({z, 1.0});
        dn.terms.push_back({z, -1.0});
      }
    }
    const double xval = x(terms[t].xi, terms[t].xj);
    up.terms.push_back({zn + t, -1.0});
    up.sense = '<';
    up.rhs = xval;
    dn.terms.push_back({zn + t, -1.0});
    dn.sense = '<';
    dn.rhs = -xval;
    rows.push_back(std::move(up));
    rows.push_back(std::move(dn));
  }
  auto res = solve_lp(nvars, obj, true, rows);
  Eigen::VectorXd mu = res.x.head(zn);
  // tiny negatives from the simplex tolerance
  for (int z = 0; z < zn; ++z) mu(z) = std::max(0.0, mu(z));
  mu /= mu.sum();
  if (payoff_out) {
    double pay = 0.0;
    for (int z = 0; z < zn; ++z) pay += mu(z) * c.table[z];
    *payoff_out = pay / den;
  }
  return mu;
}

}  // namespace detail

inline BasicResult basic_sdp_csp(const CspInstance& csp, double eps, SdpOptions opts) {
  if (std::pow(double(csp.q()), csp.k()) > 256.0)
    throw std::invalid_argument("basic_sdp_csp cap is q^k <= 256");
  const int n = csp.n(), q = csp.q();
  const int dim = n * q;
  if (dim > 600) throw std::invalid_argument("basic_sdp_csp exceeds solver cap");
  const auto& cons = csp.constraints();
  const int m = static_cast<int>(cons.size());
  const double den = csp.norm_denominator();
  const double w_pen = 1.0 / (eps * m);

  std::vector<std::vector<detail::PairTermLayout>> terms(m);
  for (int t = 0; t < m; ++t) terms[t] = detail::pair_terms(cons[t], q);

  // For binary-arity instances the penalized optimum is attained with zero
  // violation when eps < 1 (moving local mass buys at most |P|/den payoff per
  // unit of penalty 1/(eps m)), so a hard-constrained SDP gives the optimal
  // starting point: pair blocks forced to be genuine distributions.
  std::optional<GramSolution> seed_sol;
  if (csp.k() == 2) {
    SdpProblem sp;
    sp.dim = dim;
    sp.sense = Sense::Maximize;
    std::map<std::pair<int, int>, double> obj;
    for (const auto& c : cons) {
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
          int ia = c.scope[0] * q + a, jb = c.scope[1] * q + b;
          obj[{std::min(ia, jb), std::max(ia, jb)}] +=
              c.table[static_cast<std::size_t>(a) * q + b] / den;
        }
    }
    for (const auto& [ij, coef] : obj) sp.objective.add(ij.first, ij.second, coef);
    for (int v = 0; v < n; ++v) {
      sp.add_block(v * q, q);
      for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b) {
          SymLinExpr orth;
          orth.add(v * q + a, v * q + b, 1.0);
          sp.add_cut(std::move(orth), 0.0, CutSense::EQ);
        }
    }
    for (const auto& c : cons) {
      SymLinExpr sum;
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) sum.add(c.scope[0] * q + a, c.scope[1] * q + b, 1.0);
      sp.add_cut(std::move(sum), 1.0, CutSense::EQ);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
          SymLinExpr ent;
          ent.add(c.scope[0] * q + a, c.scope[1] * q + b, 1.0);
          sp.add_cut(std::move(ent), 0.0, CutSense::GE);
        }
    }
    SdpOptions so = opts;
    so.tol = std::min(opts.tol, 1e-6);
    try {
      seed_sol = solve_sdp(sp, so);
    } catch (const SdpError& e) {
      seed_sol = e.best;
    }
  }

  const int rank = std::min(dim, static_cast<int>(std::ceil(std::sqrt(2.0 * (n + 1)))) + 4);
  const int restarts = 3;
  BasicResult best;
  best.value = -std::numeric_limits<double>::infinity();

  for (int rs = 0; rs < restarts; ++rs) {
    Rng rng(derive_seed(opts.seed, 0xba51c + rs));
    Eigen::MatrixXd y(dim, rank);
    std::vector<Eigen::VectorXd> mu(m);
    if (rs == 0 && seed_sol) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(seed_sol->X);
      y.setZero();
      for (int c = 0; c < std::min(rank, dim); ++c) {
        double ev = es.eigenvalues()(dim - 1 - c);
        if (ev <= 0.0) break;
        y.col(c) = es.eigenvectors().col(dim - 1 - c) * std::sqrt(ev);
      }
      for (int t = 0; t < m; ++t) {
        mu[t] = Eigen::VectorXd::Zero(cons[t].table.size());
        for (int a = 0; a < q; ++a)
          for (int b = 0; b < q; ++b)
            mu[t](static_cast<std::size_t>(a) * q + b) = std::max(
                0.0, seed_sol->X(cons[t].scope[0] * q + a, cons[t].scope[1] * q + b));
        mu[t] /= mu[t].sum();
      }
    } else {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) y(i, j) = 0.4 * rng.next_gaussian();
      // start each local distribution at its payoff argmax
      for (int t = 0; t < m; ++t) {
        const auto& table = cons[t].table;
        int argmax = static_cast<int>(std::max_element(table.begin(), table.end()) - table.begin());
        mu[t] = Eigen::VectorXd::Zero(table.size());
        mu[t](argmax) = 1.0;
      }
    }

    std::vector<std::vector<double>> margs(m);
    auto refresh_marginals = [&]() {
      for (int t = 0; t < m; ++t) margs[t] = detail::pair_marginals(cons[t], q, mu[t]);
    };
    refresh_marginals();

    // Y-step: drive the Gram entries toward the current marginals by
    // least squares under augmented-Lagrangian block-trace constraints
    // (smooth surrogate; the reported objective uses the true L1 penalty).
    auto y_step = [&]() {
      Eigen::VectorXd lam = Eigen::VectorXd::Zero(n);
      double rho = 4.0;
      auto f_eval = [&](const Eigen::MatrixXd& yy, Eigen::MatrixXd* grad) {
        if (grad) grad->setZero();
        Eigen::MatrixXd x = yy * yy.transpose();
        double f = 0.0;
        for (int t = 0; t < m; ++t) {
          for (std::size_t pt = 0; pt < terms[t].size(); ++pt) {
            const auto& tl = terms[t][pt];
            double d = x(tl.xi, tl.xj) - margs[t][pt];
            f += 0.5 * d * d;
            if (grad) {
              if (tl.xi == tl.xj)
                grad->row(tl.xi) += (2.0 * d) * yy.row(tl.xi);
              else {
                grad->row(tl.xi) += d * yy.row(tl.xj);
                grad->row(tl.xj) += d * yy.row(tl.xi);
              }
            }
          }
        }
        for (int v = 0; v < n; ++v) {
          double g = -1.0;
          for (int a = 0; a < q; ++a) g += x(v * q + a, v * q + a);
          f += lam(v) * g + 0.5 * rho * g * g;
          if (grad) {
            double coef = lam(v) + rho * g;
            for (int a = 0; a < q; ++a) grad->row(v * q + a) += (2.0 * coef) * yy.row(v * q + a);
          }
        }
        return f;
      };
      for (int outer = 0; outer < 30; ++outer) {
        Eigen::MatrixXd grad(dim, rank);
        double f = f_eval(y, &grad);
        double step = 0.05;
        for (int it = 0; it < 800; ++it) {
          double gnorm = grad.norm();
          if (gnorm < 1e-10 * dim) break;
          bool moved = false;
          for (int ls = 0; ls < 30; ++ls) {
            Eigen::MatrixXd y_try = y - step * grad;
            double f_try = f_eval(y_try, nullptr);
            if (f_try < f - 1e-4 * step * gnorm * gnorm) {
              y = std::move(y_try);
              f = f_try;
              moved = true;
              step *= 1.6;
              break;
            }
            step *= 0.4;
          }
          if (!moved) break;
          f = f_eval(y, &grad);
        }
        double maxviol = 0.0;
        Eigen::MatrixXd x = y * y.transpose();
        for (int v = 0; v < n; ++v) {
          double g = -1.0;
          for (int a = 0; a < q; ++a) g += x(v * q + a, v * q + a);
          lam(v) += rho * g;
          maxviol = std::max(maxviol, std::abs(g));
        }
        if (maxviol < 1e-8) break;
        rho = std::min(rho * 2.0, 1e7);
      }
    };

    double prev_round_value = -std::numeric_limits<double>::infinity();
    int stall = 0;
    if (rs == 0 && seed_sol) {
      refresh_marginals();
      Eigen::MatrixXd x0 = y * y.transpose();
      double pay0 = 0.0, pen0 = 0.0;
      for (int t = 0; t < m; ++t) {
        for (int z = 0; z < static_cast<int>(cons[t].table.size()); ++z)
          pay0 += mu[t](z) * cons[t].table[z] / den;
        for (std::size_t pt = 0; pt < terms[t].size(); ++pt)
          pen0 += std::abs(margs[t][pt] - x0(terms[t][pt].xi, terms[t][pt].xj));
      }
      pen0 *= -w_pen;
      if (pay0 + pen0 > best.value) {
        best.value = pay0 + pen0;
        best.payoff_term = pay0;
        best.penalty_term = pen0;
        best.X = x0;
        best.mu = mu;
      }
    }
    for (int round = 0; round < 16; ++round) {
      y_step();
      Eigen::MatrixXd x = y * y.transpose();
      double payoff = 0.0;
      for (int t = 0; t < m; ++t) {
        double pt = 0.0;
        mu[t] = detail::optimal_local_distribution(cons[t], q, den, w_pen, x, &pt);
        payoff += pt;
      }
      refresh_marginals();
      double penalty = 0.0;
      for (int t = 0; t < m; ++t)
        for (std::size_t pt = 0; pt < terms[t].size(); ++pt)
          penalty += std::abs(margs[t][pt] - x(terms[t][pt].xi, terms[t][pt].xj));
      penalty *= -w_pen;
      double value = payoff + penalty;
      stall = value < prev_round_value + 1e-7 ? stall + 1 : 0;
      prev_round_value = value;
      if (value > best.value) {
        best.value = value;
        best.payoff_term = payoff;
        best.penalty_term = penalty;
        best.X = x;
        best.mu = mu;
      }
      if (stall >= 2) break;
    }
  }
  return best;
}

inline BasicResult basic_lp_csp(const CspInstance& csp, double eps) {
  const int n = csp.n(), q = csp.q(), k = csp.k();
  const auto& cons = csp.constraints();
  const int m = static_cast<int>(cons.size());
  const double den = csp.norm_denominator();
  const double w_pen = 1.0 / (eps * m);
  const int zn = static_cast<int>(cons.empty() ? 0 : cons[0].table.size());
  // layout: mu blocks | beta (n*q) | slack (m*k*q)
  std::vector<int> mu_off(m);
  int at = 0;
  for (int t = 0; t < m; ++t) {
    mu_off[t] = at;
    at += zn;
  }
  const int beta_off = at;
  at += n * q;
  const int s_off = at;
  at += m * k * q;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(at);
  std::vector<LpRow> rows;
  for (int t = 0; t < m; ++t) {
    LpRow sum_row;
    for (int z = 0; z < zn; ++z) {
      obj(mu_off[t] + z) = cons[t].table[z] / den;
      sum_row.terms.push_back({mu_off[t] + z, 1.0});
    }
    sum_row.sense = '=';
    sum_row.rhs = 1.0;
    rows.push_back(std::move(sum_row));
  }
  for (int i = 0; i < n; ++i) {
    LpRow r;
    for (int a = 0; a < q; ++a) r.terms.push_back({beta_off + i * q + a, 1.0});
    r.sense = '=';
    r.rhs = 1.0;
    rows.push_back(std::move(r));
  }
  for (int t = 0; t < m; ++t)
    for (int slot = 0; slot < k; ++slot)
      for (int a = 0; a < q; ++a) {
        const int s_idx = s_off + (t * k + slot) * q + a;
        obj(s_idx) = -w_pen;
        LpRow up, dn;
        for (int z = 0; z < zn; ++z) {
          int rem = z, dig = -1;
          for (int rpos = k - 1; rpos >= 0; --rpos) {
            int d = rem % q;
            rem /= q;
            if (rpos == slot) dig = d;
          }
          if (dig == a) {
            up.terms.push_back({mu_off[t] + z, 1.0});
            dn.terms.push_back({mu_off[t] + z, -1.0});
          }
        }
        const int beta_idx = beta_off + cons[t].scope[slot] * q + a;
        up.terms.push_back({beta_idx, -1.0});
        up.terms.push_back({s_idx, -1.0});
        up.sense = '<';
        up.rhs = 0.0;
        dn.terms.push_back({beta_idx, 1.0});
        dn.terms.push_back({s_idx, -1.0});
        dn.sense = '<';
        dn.rhs = 0.0;
        rows.push_back(std::move(up));
        rows.push_back(std::move(dn));
      }
  auto res = solve_lp(at, obj, true, rows);
  BasicResult out;
  out.value = res.value;
  out.mu.resize(m);
  double payoff = 0.0;
  for (int t = 0; t < m; ++t) {
    out.mu[t] = res.x.segment(mu_off[t], zn);
    for (int z = 0; z < zn; ++z) payoff += out.mu[t](z) * cons[t].table[z] / den;
  }
  out.payoff_term = payoff;
  out.penalty_term = res.value - payoff;
  return out;
}

}  // namespace relax
