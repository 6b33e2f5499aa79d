#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "saarp/evaluator.hpp"
#include "saarp/placement.hpp"
#include "saarp/rng.hpp"

namespace saarp {

struct GaConfig {
  int population_size = 10;
  int iterations = 300;
  double crossover_prob = 0.8;
  double mutation_prob = 0.1;
  std::uint64_t seed = 0;
  // The literal algorithm can lose its best chromosome to crossover or
  // mutation; elitism keeps the incumbent in the population. Off restores
  // the literal behavior.
  bool elitism = true;

  void check() const {
    if (population_size < 2) throw std::invalid_argument("P must be >= 2");
    if (iterations < 1) throw std::invalid_argument("it must be >= 1");
    if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 ||
        mutation_prob > 1.0)
      throw std::invalid_argument("probabilities must lie in [0,1]");
  }
};

struct ConvergenceTrace {
  std::vector<double> best_objective;  // per iteration, ms

  void export_csv(std::ostream& out) const {
    out << "iteration,best_objective_ms\n";
    char buf[64];
    for (std::size_t t = 0; t < best_objective.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", t + 1, best_objective[t]);
      out << buf;
    }
  }
  void export_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    export_csv(out);
  }
};

struct GassResult {
  PlacementVector best;
  double best_objective = 0.0;
  ConvergenceTrace trace;
};

// Parent pair drawn proportionally to inverse fitness; the second index is
// re-drawn until distinct from the first.
inline std::pair<std::size_t, std::size_t> select_parent_pair(
    const std::vector<double>& fitnesses, RngStream& rng) {
  if (fitnesses.size() < 2)
    throw std::invalid_argument("need at least two chromosomes");
  std::vector<double> cum(fitnesses.size());
  double acc = 0.0;
  for (std::size_t p = 0; p < fitnesses.size(); ++p) {
    if (!(fitnesses[p] > 0.0))
      throw std::domain_error("fitness values must be > 0");
    acc += 1.0 / fitnesses[p];
    cum[p] = acc;
  }
  auto draw = [&]() {
    double u = rng.uniform() * acc;
    for (std::size_t p = 0; p < cum.size(); ++p)
      if (u < cum[p]) return p;
    return cum.size() - 1;
  };
  std::size_t a = draw();
  std::size_t b = draw();
  while (b == a) b = draw();
  return {a, b};
}

// Swap the per-SBS segments from SBS j onward; j = 1 exchanges everything.
// Whole segments move, so per-SBS distinctness survives.
inline void crossover(PlacementVector& a, PlacementVector& b, RngStream& rng) {
  if (a.slots.size() != b.slots.size())
    throw std::invalid_argument("parents must have the same shape");
  int m = static_cast<int>(a.slots.size());
  int j = rng.uniform_int(1, m);
  for (int k = j; k <= m; ++k)
    std::swap(a.slots[static_cast<std::size_t>(k - 1)],
              b.slots[static_cast<std::size_t>(k - 1)]);
}

// Resample the slot list of one uniformly chosen SBS.
inline void mutate(PlacementVector& x, const ApplicationSpec& spec,
                   RngStream& rng) {
  int m = static_cast<int>(x.slots.size());
  int j = rng.uniform_int(1, m);
  resample_sbs_slots(x.slots[static_cast<std::size_t>(j - 1)], spec, rng);
}

// Genetic search minimizing g_hat_R over placements for a fixed sample set.
inline GassResult run_gass(const HetNetTopology& topology,
                           const ApplicationSpec& spec,
                           const TimingParams& params,
                           const std::vector<CompositionBatch>& batches,
                           const GaConfig& config) {
  config.check();
  RngStream rng(config.seed, /*stream_id=*/0x676173);
  const std::size_t pop_size = static_cast<std::size_t>(config.population_size);

  std::vector<PlacementVector> pop(pop_size);
  std::vector<double> fit(pop_size, 0.0);
  std::vector<char> dirty(pop_size, 1);
  for (auto& x : pop) x = random_placement(topology, spec, rng);

  auto refresh = [&]() {
    for (std::size_t p = 0; p < pop_size; ++p)
      if (dirty[p]) {
        fit[p] = saa_objective(topology, DeploymentIndex(pop[p], spec), params,
                               spec, batches);
        dirty[p] = 0;
      }
  };

  refresh();
  std::size_t best_idx = 0;
  for (std::size_t p = 1; p < pop_size; ++p)
    if (fit[p] < fit[best_idx]) best_idx = p;
  PlacementVector incumbent = pop[best_idx];
  double incumbent_fit = fit[best_idx];

  ConvergenceTrace trace;
  trace.best_objective.reserve(static_cast<std::size_t>(config.iterations));

  for (int t = 0; t < config.iterations; ++t) {
    refresh();
    std::size_t pop_best = 0, pop_worst = 0;
    for (std::size_t p = 1; p < pop_size; ++p) {
      if (fit[p] < fit[pop_best]) pop_best = p;
      if (fit[p] > fit[pop_worst]) pop_worst = p;
    }
    if (fit[pop_best] < incumbent_fit) {
      incumbent = pop[pop_best];
      incumbent_fit = fit[pop_best];
    } else if (config.elitism && fit[pop_best] > incumbent_fit) {
      pop[pop_worst] = incumbent;
      fit[pop_worst] = incumbent_fit;
    }
    trace.best_objective.push_back(config.elitism ? incumbent_fit
                                                  : fit[pop_best]);

    // Selection uses the fitness snapshot taken at the top of the
    // iteration even though crossover rewrites chromosomes mid-loop.
    std::vector<double> snapshot = fit;
    for (std::size_t p = 0; p < pop_size; ++p) {
      if (rng.uniform() < config.crossover_prob) {
        auto [p1, p2] = select_parent_pair(snapshot, rng);
        crossover(pop[p1], pop[p2], rng);
        dirty[p1] = dirty[p2] = 1;
      }
      if (rng.uniform() < config.mutation_prob) {
        mutate(pop[p], spec, rng);
        dirty[p] = 1;
      }
    }
  }

  refresh();
  std::size_t final_best = 0;
  for (std::size_t p = 1; p < pop_size; ++p)
    if (fit[p] < fit[final_best]) final_best = p;

  GassResult result;
  if (config.elitism && incumbent_fit <= fit[final_best]) {
    result.best = std::move(incumbent);
    result.best_objective = incumbent_fit;
  } else {
    result.best = pop[final_best];
    result.best_objective = fit[final_best];
  }
  result.trace = std::move(trace);
  return result;
}

}  // namespace saarp
