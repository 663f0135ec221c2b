// Subsampling experiment harness: one full solve, `trials` seeded
// sub-instance solves, aggregate statistics, CSV/JSON report output.
#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "relax/csp.hpp"
#include "relax/io.hpp"
#include "relax/relaxations.hpp"
#include "relax/subsample.hpp"

namespace relax {

struct SubsampleReport {
  std::string relaxation;
  std::string mode;  // "vertices" or "edges"
  double delta = 0.0;
  int trials = 0;
  double full_value = 0.0;
  std::vector<double> sample_values;
  std::vector<double> realized_deltas;
  double mean = 0.0;
  double stddev = 0.0;
  double abs_gap = 0.0;  // |mean - full_value|
  std::uint64_t seed = 0;
};

inline void finalize_report(SubsampleReport& rep) {
  rep.trials = static_cast<int>(rep.sample_values.size());
  double s = 0.0;
  for (double v : rep.sample_values) s += v;
  rep.mean = rep.trials > 0 ? s / rep.trials : 0.0;
  double var = 0.0;
  for (double v : rep.sample_values) var += (v - rep.mean) * (v - rep.mean);
  rep.stddev = rep.trials > 1 ? std::sqrt(var / (rep.trials - 1)) : 0.0;
  rep.abs_gap = std::abs(rep.mean - rep.full_value);
}

// Solves one instance under the named relaxation. The brute-force "bf" entry
// is the exact CSP oracle; its cap is raised to cover desk-scale subsamples.
inline double solve_instance(const RelaxationId& id, const Instance& inst,
                             const SdpOptions& opts) {
  switch (id.kind) {
    case RelaxKind::Gw:
      return gw_sdp(std::get<NormalizedGraph>(inst), opts).value;
    case RelaxKind::Sdp3:
      return sdp3(std::get<NormalizedGraph>(inst), opts).value;
    case RelaxKind::ShAd:
      return sherali_adams(std::get<NormalizedGraph>(inst), id.r).value;
    case RelaxKind::Ug:
      return ug_sdp(std::get<UniqueGame>(inst), false, opts).value;
    case RelaxKind::Ug3:
      return ug_sdp(std::get<UniqueGame>(inst), true, opts).value;
    case RelaxKind::BasicSdp:
      return basic_sdp_csp(std::get<CspInstance>(inst), id.eps, opts).value;
    case RelaxKind::BasicLp:
      return basic_lp_csp(std::get<CspInstance>(inst), id.eps).value;
    case RelaxKind::BruteForce:
      return brute_force_opt(std::get<CspInstance>(inst), double(1ULL << 32)).value;
    case RelaxKind::CutNorm:
      throw std::invalid_argument("cutnorm operates on matrices, not instances");
  }
  throw std::logic_error("unhandled relaxation kind");
}

struct ExperimentOptions {
  SampleMode sample_mode = SampleMode::FixedSize;
  bool edge_mode = false;  // edge subsampling (graphs only)
  int jobs = 1;
  SdpOptions solver;
};

inline SubsampleReport subsample_experiment(const Instance& inst, const RelaxationId& id,
                                            double delta, int trials, std::uint64_t seed,
                                            const ExperimentOptions& opts = {}) {
  if (opts.edge_mode && !std::holds_alternative<NormalizedGraph>(inst))
    throw std::invalid_argument("edge subsampling applies to graphs only");
  SubsampleReport rep;
  rep.relaxation = id.str();
  rep.mode = opts.edge_mode ? "edges" : "vertices";
  rep.delta = delta;
  rep.seed = seed;
  rep.full_value = solve_instance(id, inst, opts.solver);

  auto run_trial = [&](int t) -> std::pair<double, double> {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    try {
      Instance sub = inst;
      double realized = delta;
      if (std::holds_alternative<NormalizedGraph>(inst)) {
        const auto& g = std::get<NormalizedGraph>(inst);
        if (opts.edge_mode) {
          auto es = edge_subsample(g, delta, trial_seed);
          realized = es.realized_delta;
          sub = std::move(es.graph);
        } else {
          auto vs = vertex_subsample_graph(g, delta, trial_seed, opts.sample_mode);
          realized = vs.realized_delta;
          sub = std::move(vs.graph);
        }
      } else if (std::holds_alternative<CspInstance>(inst)) {
        auto cs = vertex_subsample(std::get<CspInstance>(inst), delta, trial_seed,
                                   opts.sample_mode);
        realized = cs.realized_delta;
        sub = std::move(cs.csp);
      } else {
        const auto& game = std::get<UniqueGame>(inst);
        auto u = sample_vertices(game.n(), delta, trial_seed, opts.sample_mode);
        realized = static_cast<double>(u.size()) / game.n();
        sub = game.induced(u);
      }
      SdpOptions solver = opts.solver;
      solver.seed = derive_seed(seed, 100000 + t);
      return {solve_instance(id, sub, solver), realized};
    } catch (const std::exception& e) {
      throw std::runtime_error("trial " + std::to_string(t) + " failed: " + e.what());
    }
  };

  std::vector<std::pair<double, double>> results(trials);
  if (opts.jobs > 1) {
    std::vector<std::future<std::pair<double, double>>> futs;
    futs.reserve(trials);
    for (int t = 0; t < trials; ++t)
      futs.push_back(std::async(std::launch::async, run_trial, t));
    for (int t = 0; t < trials; ++t) results[t] = futs[t].get();
  } else {
    for (int t = 0; t < trials; ++t) results[t] = run_trial(t);
  }
  for (const auto& [value, realized] : results) {
    rep.sample_values.push_back(value);
    rep.realized_deltas.push_back(realized);
  }
  finalize_report(rep);
  return rep;
}

inline std::string report_to_csv(const SubsampleReport& rep) {
  std::ostringstream os;
  os << "trial,realized_delta,value\n";
  for (int t = 0; t < rep.trials; ++t)
    os << t << "," << detail::fmt17(rep.realized_deltas[t]) << ","
       << detail::fmt17(rep.sample_values[t]) << "\n";
  return os.str();
}

inline nlohmann::json report_to_json(const SubsampleReport& rep) {
  return nlohmann::json{{"relaxation", rep.relaxation},
                        {"mode", rep.mode},
                        {"delta", rep.delta},
                        {"trials", rep.trials},
                        {"seed", rep.seed},
                        {"full_value", rep.full_value},
                        {"mean", rep.mean},
                        {"stddev", rep.stddev},
                        {"abs_gap", rep.abs_gap}};
}

}  // namespace relax
