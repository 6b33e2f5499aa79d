#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "saarp/application.hpp"
#include "saarp/evaluator.hpp"
#include "saarp/gass.hpp"
#include "saarp/rng.hpp"

namespace saarp {

struct SaaConfig {
  std::size_t R = 500;         // training sample size
  std::size_t R_prime = 100000;  // evaluation sample size, R' >> R
  int L = 10;                  // replications
  double epsilon = 2e-4;       // gap tolerance, ms
  double escalation = 2.0;     // multiplier for R and R' on gap failure
  int max_rounds = 5;
  std::uint64_t seed = 0;
  bool parallel = true;

  void check() const {
    if (R < 1 || R_prime < R) throw std::invalid_argument("need R' >= R >= 1");
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
    if (escalation <= 1.0) throw std::invalid_argument("escalation must be > 1");
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  }
};

struct ReplicationRecord {
  double g_hat = 0.0;  // g_hat_R(x_hat*_l)
  double v = 0.0;      // v^l_{R'}
};

struct RoundDiagnostics {
  int round = 0;  // 1-based
  std::size_t R = 0;
  std::size_t R_prime = 0;
  std::vector<ReplicationRecord> replications;
  double v_bar = 0.0;    // mean of g_hat over replications
  double v_worst = 0.0;  // max of v over replications
  double gap = 0.0;      // v_worst - v_bar
  bool converged = false;
};

struct SaaOutcome {
  PlacementVector best;
  int best_replication = 0;  // 1-based, within the final round
  std::vector<RoundDiagnostics> rounds;
  int rounds_used = 0;
  bool converged = false;

  const RoundDiagnostics& final_round() const { return rounds.back(); }
  double gap() const { return final_round().gap; }
};

namespace detail {

// Stream ids: one namespace for training draws, a disjoint one for the
// high-fidelity evaluation draws.
inline constexpr std::uint64_t kTrainTag = 0x11;
inline constexpr std::uint64_t kEvalTag = 0x22;

inline std::uint64_t stream_id(std::uint64_t tag, int round, int l) {
  return (tag << 32) ^ (static_cast<std::uint64_t>(round) << 16) ^
         static_cast<std::uint64_t>(l);
}

}  // namespace detail

// One SAA replication: draw R batches on the replication's own stream and
// let GASS solve the resulting deterministic problem.
inline std::pair<PlacementVector, double> run_replication(
    int l, const HetNetTopology& topology, const ApplicationSpec& spec,
    const TimingParams& params, const CompositionModel& model, std::size_t R,
    const GaConfig& ga_config, std::uint64_t seed, int round = 1) {
  RngStream rng(seed, detail::stream_id(detail::kTrainTag, round, l));
  auto batches = model.sample_batch(topology.device_count(),
                                    static_cast<int>(R), rng);
  GaConfig ga = ga_config;
  ga.seed = rng.next_u64();
  auto result = run_gass(topology, spec, params, batches, ga);
  return {std::move(result.best), result.best_objective};
}

// v^l_{R'}: mean G over R' fresh batches, independent of the training draws.
inline double estimate_true_value(const PlacementVector& x,
                                  const HetNetTopology& topology,
                                  const ApplicationSpec& spec,
                                  const TimingParams& params,
                                  const CompositionModel& model,
                                  std::size_t R_prime, std::uint64_t seed,
                                  int l = 0, int round = 1) {
  if (R_prime < 1) throw std::invalid_argument("R' must be >= 1");
  RngStream rng(seed, detail::stream_id(detail::kEvalTag, round, l));
  DeploymentIndex dep(x, spec);
  double sum = 0.0;
  Scheme scratch;
  for (std::size_t r = 0; r < R_prime; ++r) {
    double g = 0.0;
    for (int i = 1; i <= topology.device_count(); ++i) {
      scratch = model.sample_composition(rng);
      g += device_total(topology, dep, params, spec, i, scratch);
    }
    sum += g;
  }
  return sum / static_cast<double>(R_prime);
}

// Outer protocol: L replications per round, high-fidelity re-evaluation,
// gap test, escalate R and R' until the gap closes or rounds run out.
inline SaaOutcome run_saa_rp(const HetNetTopology& topology,
                             const ApplicationSpec& spec,
                             const TimingParams& params,
                             const CompositionModel& model,
                             const SaaConfig& saa_config,
                             const GaConfig& ga_config) {
  saa_config.check();
  std::size_t R = saa_config.R;
  std::size_t R_prime = saa_config.R_prime;

  SaaOutcome outcome;
  for (int round = 1; round <= saa_config.max_rounds; ++round) {
    RoundDiagnostics diag;
    diag.round = round;
    diag.R = R;
    diag.R_prime = R_prime;

    std::vector<PlacementVector> solutions(static_cast<std::size_t>(saa_config.L));
    diag.replications.resize(static_cast<std::size_t>(saa_config.L));

    auto solve_one = [&](int l) {
      auto [x, g_hat] = run_replication(l, topology, spec, params, model, R,
                                        ga_config, saa_config.seed, round);
      double v = estimate_true_value(x, topology, spec, params, model, R_prime,
                                     saa_config.seed, l, round);
      solutions[static_cast<std::size_t>(l - 1)] = std::move(x);
      diag.replications[static_cast<std::size_t>(l - 1)] = {g_hat, v};
    };

    if (saa_config.parallel) {
      std::vector<std::future<void>> jobs;
      for (int l = 1; l <= saa_config.L; ++l)
        jobs.push_back(std::async(std::launch::async, solve_one, l));
      for (auto& j : jobs) j.get();
    } else {
      for (int l = 1; l <= saa_config.L; ++l) solve_one(l);
    }

    double sum_g = 0.0;
    for (const auto& rec : diag.replications) sum_g += rec.g_hat;
    diag.v_bar = sum_g / static_cast<double>(saa_config.L);
    int worst_l = 1, best_l = 1;
    for (int l = 2; l <= saa_config.L; ++l) {
      const auto& rec = diag.replications[static_cast<std::size_t>(l - 1)];
      if (rec.v > diag.replications[static_cast<std::size_t>(worst_l - 1)].v)
        worst_l = l;
      if (rec.v < diag.replications[static_cast<std::size_t>(best_l - 1)].v)
        best_l = l;
    }
    diag.v_worst = diag.replications[static_cast<std::size_t>(worst_l - 1)].v;
    diag.gap = diag.v_worst - diag.v_bar;
    diag.converged = diag.gap < saa_config.epsilon;
    outcome.rounds.push_back(diag);
    outcome.rounds_used = round;

    // Best solution = minimal high-fidelity estimate (g_hat is
    // optimistically biased).
    outcome.best = solutions[static_cast<std::size_t>(best_l - 1)];
    outcome.best_replication = best_l;
    outcome.converged = diag.converged;
    if (diag.converged) break;

    R = static_cast<std::size_t>(static_cast<double>(R) * saa_config.escalation);
    R_prime = static_cast<std::size_t>(static_cast<double>(R_prime) *
                                       saa_config.escalation);
  }
  return outcome;
}

// Report CSV: detail rows per replication, then one summary row per round.
inline void export_outcome(const SaaOutcome& outcome, std::ostream& out) {
  char buf[160];
  out << "round,replication,g_hat_ms,v_ms\n";
  for (const auto& d : outcome.rounds)
    for (std::size_t l = 0; l < d.replications.size(); ++l) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g,%.17g\n", d.round, l + 1,
                    d.replications[l].g_hat, d.replications[l].v);
      out << buf;
    }
  out << "round,v_bar_ms,v_worst_ms,gap_ms,converged\n";
  for (const auto& d : outcome.rounds) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d\n", d.round,
                  d.v_bar, d.v_worst, d.gap, d.converged ? 1 : 0);
    out << buf;
  }
}

inline void export_outcome_file(const SaaOutcome& outcome,
                                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  export_outcome(outcome, out);
}

// Parse the report back (used to cross-check emitted diagnostics).
struct ParsedOutcome {
  std::vector<RoundDiagnostics> rounds;
};

inline ParsedOutcome parse_outcome(std::istream& in) {
  ParsedOutcome parsed;
  std::string line;
  if (!std::getline(in, line) || line != "round,replication,g_hat_ms,v_ms")
    throw std::runtime_error("outcome CSV: bad detail header");
  bool in_summary = false;
  auto round_ref = [&parsed](int round) -> RoundDiagnostics& {
    while (static_cast<int>(parsed.rounds.size()) < round) {
      parsed.rounds.push_back({});
      parsed.rounds.back().round = static_cast<int>(parsed.rounds.size());
    }
    return parsed.rounds[static_cast<std::size_t>(round - 1)];
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "round,v_bar_ms,v_worst_ms,gap_ms,converged") {
      in_summary = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!in_summary) {
      if (fields.size() != 4)
        throw std::runtime_error("outcome CSV: bad detail row");
      auto& d = round_ref(std::stoi(fields[0]));
      d.replications.push_back({std::stod(fields[2]), std::stod(fields[3])});
    } else {
      if (fields.size() != 5)
        throw std::runtime_error("outcome CSV: bad summary row");
      auto& d = round_ref(std::stoi(fields[0]));
      d.v_bar = std::stod(fields[1]);
      d.v_worst = std::stod(fields[2]);
      d.gap = std::stod(fields[3]);
      d.converged = fields[4] == "1";
    }
  }
  return parsed;
}

}  // namespace saarp
