#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "saarp/application.hpp"
#include "saarp/evaluator.hpp"
#include "saarp/gass.hpp"
#include "saarp/placement.hpp"
#include "saarp/rng.hpp"
#include "saarp/topology.hpp"

namespace saarp {

namespace detail {

inline bool place_on(PlacementVector& x, int sbs, int g) {
  auto& slots = x.slots[static_cast<std::size_t>(sbs - 1)];
  for (auto& v : slots)
    if (v == 0) {
      v = g;
      return true;
    }
  return false;
}

inline std::vector<int> sbs_with_room(const PlacementVector& x) {
  std::vector<int> out;
  for (std::size_t j = 0; j < x.slots.size(); ++j)
    if (std::any_of(x.slots[j].begin(), x.slots[j].end(),
                    [](int v) { return v == 0; }))
      out.push_back(static_cast<int>(j) + 1);
  return out;
}

}  // namespace detail

// Scenario #1 random placement: every candidate goes to exactly one SBS
// drawn uniformly among those with remaining capacity; once capacity runs
// out the remaining candidates stay unplaced (served by cloud).
inline PlacementVector rp1(const HetNetTopology& topology,
                           const ApplicationSpec& spec, std::uint64_t seed) {
  RngStream rng(seed, /*stream_id=*/0x727031);
  PlacementVector x = empty_placement(topology);
  for (int g = 1; g <= spec.total_candidates(); ++g) {
    auto room = detail::sbs_with_room(x);
    if (room.empty()) break;
    detail::place_on(x, room[rng.uniform_index(room.size())], g);
  }
  return x;
}

// Scenario #2 random placement: per candidate, a copy count m drawn
// uniformly from 0..M; copies go to distinct SBSs with remaining capacity.
inline PlacementVector rp2(const HetNetTopology& topology,
                           const ApplicationSpec& spec, std::uint64_t seed) {
  RngStream rng(seed, /*stream_id=*/0x727032);
  PlacementVector x = empty_placement(topology);
  for (int g = 1; g <= spec.total_candidates(); ++g) {
    auto room = detail::sbs_with_room(x);
    if (room.empty()) break;
    int m = rng.uniform_int(0, topology.sbs_count());
    std::shuffle(room.begin(), room.end(), rng.engine());
    int placed = 0;
    for (int j : room) {
      if (placed >= m) break;
      detail::place_on(x, j, g);
      ++placed;
    }
  }
  return x;
}

namespace detail {

// One SBS per candidate (0 = unplaced). Overflowing assignments move to a
// random SBS with room, else drop to unplaced.
struct Ga1Chromosome {
  std::vector<int> assign;  // per global candidate
};

inline void ga1_repair(Ga1Chromosome& ch, const HetNetTopology& topology,
                       RngStream& rng) {
  std::vector<int> load(static_cast<std::size_t>(topology.sbs_count()) + 1, 0);
  for (int j : ch.assign)
    if (j != 0) ++load[static_cast<std::size_t>(j)];
  auto has_room = [&](int j) {
    return load[static_cast<std::size_t>(j)] < topology.sbs(j).capacity;
  };
  for (auto& j : ch.assign) {
    if (j == 0) continue;
    if (load[static_cast<std::size_t>(j)] <= topology.sbs(j).capacity) continue;
    std::vector<int> room;
    for (int j2 = 1; j2 <= topology.sbs_count(); ++j2)
      if (has_room(j2)) room.push_back(j2);
    --load[static_cast<std::size_t>(j)];
    if (room.empty()) {
      j = 0;
    } else {
      j = room[rng.uniform_index(room.size())];
      ++load[static_cast<std::size_t>(j)];
    }
  }
}

inline PlacementVector ga1_decode(const Ga1Chromosome& ch,
                                  const HetNetTopology& topology) {
  PlacementVector x = empty_placement(topology);
  for (std::size_t g = 0; g < ch.assign.size(); ++g)
    if (ch.assign[g] != 0)
      place_on(x, ch.assign[g], static_cast<int>(g) + 1);
  return x;
}

}  // namespace detail

// Scenario #1 genetic baseline over per-candidate SBS assignments; shares
// the selection scheme and operator rates with GASS.
inline PlacementVector ga1(const HetNetTopology& topology,
                           const ApplicationSpec& spec,
                           const TimingParams& params,
                           const std::vector<CompositionBatch>& batches,
                           const GaConfig& config) {
  config.check();
  RngStream rng(config.seed, /*stream_id=*/0x676131);
  const std::size_t pop_size = static_cast<std::size_t>(config.population_size);
  const std::size_t g_total = static_cast<std::size_t>(spec.total_candidates());

  auto random_chromosome = [&]() {
    detail::Ga1Chromosome ch;
    ch.assign.resize(g_total);
    for (auto& j : ch.assign) j = rng.uniform_int(1, topology.sbs_count());
    detail::ga1_repair(ch, topology, rng);
    return ch;
  };

  std::vector<detail::Ga1Chromosome> pop(pop_size);
  std::vector<double> fit(pop_size, 0.0);
  std::vector<char> dirty(pop_size, 1);
  for (auto& ch : pop) ch = random_chromosome();

  auto evaluate = [&](const detail::Ga1Chromosome& ch) {
    return saa_objective(topology,
                         DeploymentIndex(detail::ga1_decode(ch, topology), spec),
                         params, spec, batches);
  };
  auto refresh = [&]() {
    for (std::size_t p = 0; p < pop_size; ++p)
      if (dirty[p]) {
        fit[p] = evaluate(pop[p]);
        dirty[p] = 0;
      }
  };

  refresh();
  std::size_t best_idx = 0;
  for (std::size_t p = 1; p < pop_size; ++p)
    if (fit[p] < fit[best_idx]) best_idx = p;
  detail::Ga1Chromosome incumbent = pop[best_idx];
  double incumbent_fit = fit[best_idx];

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
    } else if (fit[pop_best] > incumbent_fit) {
      pop[pop_worst] = incumbent;
      fit[pop_worst] = incumbent_fit;
    }
    std::vector<double> snapshot = fit;
    for (std::size_t p = 0; p < pop_size; ++p) {
      if (rng.uniform() < config.crossover_prob && g_total >= 2) {
        auto [p1, p2] = select_parent_pair(snapshot, rng);
        std::size_t cut = 1 + rng.uniform_index(g_total - 1);
        for (std::size_t g = cut; g < g_total; ++g)
          std::swap(pop[p1].assign[g], pop[p2].assign[g]);
        detail::ga1_repair(pop[p1], topology, rng);
        detail::ga1_repair(pop[p2], topology, rng);
        dirty[p1] = dirty[p2] = 1;
      }
      if (rng.uniform() < config.mutation_prob) {
        std::size_t g = rng.uniform_index(g_total);
        pop[p].assign[g] = rng.uniform_int(1, topology.sbs_count());
        detail::ga1_repair(pop[p], topology, rng);
        dirty[p] = 1;
      }
    }
  }

  refresh();
  std::size_t final_best = 0;
  for (std::size_t p = 1; p < pop_size; ++p)
    if (fit[p] < fit[final_best]) final_best = p;
  const auto& winner =
      incumbent_fit <= fit[final_best] ? incumbent : pop[final_best];
  return detail::ga1_decode(winner, topology);
}

// Marginal request probability per candidate: exact forward pass over the
// chain's transition matrices.
inline std::vector<double> marginal_probabilities(
    const CompositionModel& model) {
  const auto& spec = model.spec();
  std::vector<double> out;
  std::vector<double> cur = model.initial();
  out.insert(out.end(), cur.begin(), cur.end());
  for (int q = 2; q <= spec.q_count(); ++q) {
    std::vector<double> next(static_cast<std::size_t>(spec.candidates(q)), 0.0);
    for (int c1 = 1; c1 <= spec.candidates(q - 1); ++c1) {
      const auto& row = model.transition_row(q, c1);
      for (std::size_t c2 = 0; c2 < row.size(); ++c2)
        next[c2] += cur[static_cast<std::size_t>(c1 - 1)] * row[c2];
    }
    out.insert(out.end(), next.begin(), next.end());
    cur = std::move(next);
  }
  return out;
}

// Greedy scenario #2: every SBS is filled to capacity with the globally
// most-probable candidates, taken rank-by-rank across microservices (the
// rank-1 candidate of each microservice ordered by probability, then the
// rank-2 candidates, and so on).
inline PlacementVector gp2(const HetNetTopology& topology,
                           const ApplicationSpec& spec,
                           const CompositionModel& model) {
  auto marginals = marginal_probabilities(model);

  // Candidates of each microservice ordered by descending marginal
  // probability; ties by global index.
  std::vector<std::vector<int>> ranked(static_cast<std::size_t>(spec.q_count()));
  for (int q = 1; q <= spec.q_count(); ++q) {
    auto& lst = ranked[static_cast<std::size_t>(q - 1)];
    for (int c = 1; c <= spec.candidates(q); ++c)
      lst.push_back(spec.global_index(q, c));
    std::stable_sort(lst.begin(), lst.end(), [&](int a, int b) {
      return marginals[static_cast<std::size_t>(a - 1)] >
             marginals[static_cast<std::size_t>(b - 1)];
    });
  }

  std::vector<int> fill_order;
  int max_rank = 0;
  for (const auto& lst : ranked)
    max_rank = std::max(max_rank, static_cast<int>(lst.size()));
  for (int rank = 0; rank < max_rank; ++rank) {
    std::vector<int> block;
    for (const auto& lst : ranked)
      if (rank < static_cast<int>(lst.size()))
        block.push_back(lst[static_cast<std::size_t>(rank)]);
    std::stable_sort(block.begin(), block.end(), [&](int a, int b) {
      return marginals[static_cast<std::size_t>(a - 1)] >
             marginals[static_cast<std::size_t>(b - 1)];
    });
    fill_order.insert(fill_order.end(), block.begin(), block.end());
  }

  PlacementVector x = empty_placement(topology);
  for (int j = 1; j <= topology.sbs_count(); ++j) {
    int take = std::min(topology.sbs(j).capacity, spec.total_candidates());
    for (int k = 0; k < take; ++k)
      x.slots[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)] =
          fill_order[static_cast<std::size_t>(k)];
  }
  return x;
}

}  // namespace saarp
