#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "saarp/application.hpp"
#include "saarp/baselines.hpp"
#include "saarp/evaluator.hpp"
#include "saarp/gass.hpp"
#include "saarp/placement.hpp"
#include "saarp/saa.hpp"
#include "saarp/topology.hpp"

namespace saarp {

// Usage error (exit 2) vs I/O error (exit 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // Application
  int Q = 10;
  int c_min = 2, c_max = 5;
  // HetNet
  int N = 500, M = 40;
  int b_min = 3, b_max = 5;
  double radius_min = 200.0, radius_max = 600.0;
  int max_diameter = 4;
  double area = 2000.0;  // synthetic square side, meters
  // Timing
  double alpha_min = 1.0, alpha_max = 8.0;  // kbits
  double beta = 5.0;                        // ms per hop
  double tau_b = 100.0;                     // ms
  double exec_min = 1.0, exec_max = 2.0;    // ms
  double d_sbs = 1.0, d_mbs = 1.0;          // ms per kbit
  // SAA
  std::size_t R = 500;
  std::size_t R_prime = 100000;
  int L = 10;
  double epsilon = 2e-4;
  double escalation = 2.0;
  int max_rounds = 5;
  // GA
  int P = 10;
  int iterations = 300;
  double P_m = 0.1;
  double P_c = 0.8;
  // Harness
  std::string dataset;  // empty => synthetic
  bool synth = true;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;
  std::string outdir = ".";
  std::size_t eval_R = 0;  // held-out sample count; 0 => R_prime
  // For rp1/rp2 the drawn-placement average uses this many draws.
  std::size_t policy_draws = 0;  // 0 => R

  std::size_t effective_eval_r() const { return eval_R ? eval_R : R_prime; }
  std::size_t effective_draws() const { return policy_draws ? policy_draws : R; }

  void check() const {
    if (c_min < 1 || c_min > c_max || b_min < 0 || b_min > b_max ||
        radius_min <= 0 || radius_min > radius_max || alpha_min > alpha_max ||
        exec_min > exec_max)
      throw UsageError("malformed range in configuration");
    if (P_m < 0 || P_m > 1 || P_c < 0 || P_c > 1)
      throw UsageError("probabilities must lie in [0,1]");
  }
};

namespace detail {

inline constexpr std::uint64_t kHeldoutTag = 0x33;
inline constexpr std::uint64_t kTrainCliTag = 0x44;

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

inline std::string instance_key(const ExperimentConfig& c,
                                std::uint64_t seed) {
  std::ostringstream ss;
  ss << c.Q << "|" << c.c_min << "|" << c.c_max << "|" << c.N << "|" << c.M
     << "|" << c.b_min << "|" << c.b_max << "|" << c.radius_min << "|"
     << c.radius_max << "|" << c.max_diameter << "|" << c.area << "|"
     << c.alpha_min << "|" << c.alpha_max << "|" << c.beta << "|" << c.tau_b
     << "|" << c.exec_min << "|" << c.exec_max << "|" << c.d_sbs << "|"
     << c.d_mbs << "|" << c.dataset << "|" << seed;
  return ss.str();
}

inline std::string config_key(const ExperimentConfig& c) {
  std::ostringstream ss;
  ss << instance_key(c, 0) << "|" << c.R << "|" << c.R_prime << "|" << c.L
     << "|" << c.epsilon << "|" << c.escalation << "|" << c.max_rounds << "|"
     << c.P << "|" << c.iterations << "|" << c.P_m << "|" << c.P_c << "|"
     << c.effective_eval_r() << "|" << c.effective_draws();
  return ss.str();
}

}  // namespace detail

// One fully built problem instance, reproducible from (config, seed).
struct Instance {
  HetNetTopology topology;
  ApplicationSpec spec;
  CompositionModel model;
  TimingParams params;
  std::string id;
};

inline Instance build_instance(const ExperimentConfig& config,
                               std::uint64_t seed) {
  config.check();
  auto topology =
      config.dataset.empty()
          ? synth_generate(config.N, config.M, config.area,
                           {config.radius_min, config.radius_max},
                           {config.b_min, config.b_max}, seed,
                           config.max_diameter)
          : load_geolocation_csv(config.dataset, config.N, config.M,
                                 {config.radius_min, config.radius_max},
                                 {config.b_min, config.b_max}, seed,
                                 config.max_diameter);
  auto spec = random_spec(config.Q, config.c_min, config.c_max, seed);
  auto model = uniform_model(spec, seed);
  auto params = make_timing_params(
      topology, spec, seed, {config.alpha_min, config.alpha_max},
      {config.exec_min, config.exec_max}, config.beta, config.tau_b,
      config.d_sbs, config.d_mbs);
  Instance inst{std::move(topology), std::move(spec), std::move(model),
                std::move(params),
                detail::hex16(detail::fnv1a(detail::instance_key(config, seed)))};
  return inst;
}

struct SummaryRow {
  std::string instance_id;
  std::string policy;
  std::uint64_t seed = 0;
  double objective_ms = 0.0;
  std::size_t eval_R = 0;
  double wall_ms = 0.0;
  std::string config_hash;
};

inline void write_summary(const std::vector<SummaryRow>& rows,
                          std::ostream& out) {
  out << "instance_id,policy,seed,objective_ms,eval_R,wall_ms,config_hash\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.objective_ms);
    out << r.instance_id << "," << r.policy << "," << r.seed << "," << buf
        << "," << r.eval_R << "," << r.wall_ms << "," << r.config_hash << "\n";
  }
}

inline std::vector<SummaryRow> read_summary(std::istream& in) {
  std::vector<SummaryRow> rows;
  std::string line;
  if (!std::getline(in, line) ||
      line != "instance_id,policy,seed,objective_ms,eval_R,wall_ms,config_hash")
    throw std::runtime_error("summary CSV: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 7) throw std::runtime_error("summary CSV: bad row");
    rows.push_back({f[0], f[1], std::stoull(f[2]), std::stod(f[3]),
                    std::stoull(f[4]), std::stod(f[5]), f[6]});
  }
  return rows;
}

inline const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> p = {"gass", "saarp", "rp1",
                                             "rp2",  "ga1",   "gp2"};
  return p;
}

// Run one (policy, seed) cell on a prebuilt instance and shared held-out
// sample set. Randomized one-shot policies (rp1, rp2) are averaged over
// `draws` placements on the same held-out set.
inline SummaryRow run_policy_cell(const std::string& policy,
                                  const Instance& inst,
                                  const ExperimentConfig& config,
                                  std::uint64_t seed,
                                  const std::vector<CompositionBatch>& heldout,
                                  const std::string& outdir) {
  auto t0 = std::chrono::steady_clock::now();
  GaConfig ga;
  ga.population_size = config.P;
  ga.iterations = config.iterations;
  ga.crossover_prob = config.P_c;
  ga.mutation_prob = config.P_m;
  ga.seed = seed;

  auto heldout_of = [&](const PlacementVector& x) {
    return saa_objective(inst.topology, x, inst.params, inst.spec, heldout);
  };
  auto train_batches = [&]() {
    RngStream rng(seed, detail::kTrainCliTag);
    return inst.model.sample_batch(inst.topology.device_count(),
                                   static_cast<int>(config.R), rng);
  };
  auto cell_path = [&](const std::string& kind) {
    return outdir + "/" + kind + "_" + policy + "_" + std::to_string(seed) +
           ".csv";
  };

  double objective = 0.0;
  std::optional<PlacementVector> placement;
  if (policy == "gass") {
    auto result = run_gass(inst.topology, inst.spec, inst.params,
                           train_batches(), ga);
    result.trace.export_csv_file(cell_path("trace"));
    placement = std::move(result.best);
    objective = heldout_of(*placement);
  } else if (policy == "saarp") {
    SaaConfig sc;
    sc.R = config.R;
    sc.R_prime = config.R_prime;
    sc.L = config.L;
    sc.epsilon = config.epsilon;
    sc.escalation = config.escalation;
    sc.max_rounds = config.max_rounds;
    sc.seed = seed;
    auto outcome = run_saa_rp(inst.topology, inst.spec, inst.params,
                              inst.model, sc, ga);
    export_outcome_file(outcome, cell_path("outcome"));
    placement = std::move(outcome.best);
    objective = heldout_of(*placement);
  } else if (policy == "ga1") {
    placement = ga1(inst.topology, inst.spec, inst.params, train_batches(), ga);
    objective = heldout_of(*placement);
  } else if (policy == "gp2") {
    placement = gp2(inst.topology, inst.spec, inst.model);
    objective = heldout_of(*placement);
  } else if (policy == "rp1" || policy == "rp2") {
    RngStream draws_rng(seed, policy == "rp1" ? 0x6472310ULL : 0x6472320ULL);
    double sum = 0.0;
    const std::size_t draws = config.effective_draws();
    for (std::size_t d = 0; d < draws; ++d) {
      auto x = policy == "rp1" ? rp1(inst.topology, inst.spec, draws_rng.next_u64())
                               : rp2(inst.topology, inst.spec, draws_rng.next_u64());
      sum += heldout_of(x);
      placement = std::move(x);  // keep the last draw for the archive
    }
    objective = sum / static_cast<double>(draws);
  } else {
    throw UsageError("unknown policy '" + policy + "'");
  }
  if (placement)
    export_placement_file(*placement, inst.spec, cell_path("placement"));

  auto t1 = std::chrono::steady_clock::now();
  SummaryRow row;
  row.instance_id = inst.id;
  row.policy = policy;
  row.seed = seed;
  row.objective_ms = objective;
  row.eval_R = heldout.size();
  row.wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  row.config_hash = detail::hex16(detail::fnv1a(detail::config_key(config)));
  return row;
}

// Full grid: every (policy, seed) cell shares one held-out sample set per
// instance so differences reflect placements, not sampling noise.
inline std::vector<SummaryRow> run_experiment(const ExperimentConfig& config) {
  config.check();
  if (config.policies.empty()) throw UsageError("no policy given");
  if (config.seeds.empty()) throw UsageError("no seed given");
  for (const auto& p : config.policies)
    if (std::find(known_policies().begin(), known_policies().end(), p) ==
        known_policies().end())
      throw UsageError("unknown policy '" + p + "'");
  std::filesystem::create_directories(config.outdir);

  std::vector<SummaryRow> rows;
  for (std::uint64_t seed : config.seeds) {
    auto inst = build_instance(config, seed);
    RngStream heldout_rng(seed, detail::kHeldoutTag);
    auto heldout = inst.model.sample_batch(
        inst.topology.device_count(),
        static_cast<int>(config.effective_eval_r()), heldout_rng);
    for (const auto& policy : config.policies)
      rows.push_back(run_policy_cell(policy, inst, config, seed, heldout,
                                     config.outdir));
  }
  std::ofstream out(config.outdir + "/summary.csv");
  if (!out)
    throw std::runtime_error("cannot open " + config.outdir + "/summary.csv");
  write_summary(rows, out);
  return rows;
}

struct PolicyStats {
  std::string policy;
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double gap_vs_gass_pct = 0.0;  // (other - gass) / gass * 100
};

// Per-policy mean/std over seeds plus percentage gaps against gass;
// sorted ascending by mean objective.
inline std::vector<PolicyStats> compare(const std::vector<SummaryRow>& rows) {
  if (rows.empty()) throw std::runtime_error("no summary rows");
  std::map<std::string, std::vector<const SummaryRow*>> by_policy;
  for (const auto& r : rows) by_policy[r.policy].push_back(&r);

  // Cross-policy comparison only makes sense on identical instances.
  std::optional<std::set<std::string>> reference_ids;
  for (const auto& [policy, prows] : by_policy) {
    std::set<std::string> ids;
    for (const auto* r : prows) ids.insert(r->instance_id);
    if (!reference_ids) {
      reference_ids = std::move(ids);
    } else if (ids != *reference_ids) {
      throw std::runtime_error(
          "summaries cover different instances; refusing to compare");
    }
  }

  std::vector<PolicyStats> stats;
  for (const auto& [policy, prows] : by_policy) {
    PolicyStats s;
    s.policy = policy;
    s.n = static_cast<int>(prows.size());
    for (const auto* r : prows) s.mean += r->objective_ms;
    s.mean /= s.n;
    double ss = 0.0;
    for (const auto* r : prows)
      ss += (r->objective_ms - s.mean) * (r->objective_ms - s.mean);
    s.stddev = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;
    stats.push_back(s);
  }
  double gass_mean = 0.0;
  bool have_gass = false;
  for (const auto& s : stats)
    if (s.policy == "gass") {
      gass_mean = s.mean;
      have_gass = true;
    }
  for (auto& s : stats)
    s.gap_vs_gass_pct =
        have_gass ? (s.mean - gass_mean) / gass_mean * 100.0
                  : std::numeric_limits<double>::quiet_NaN();
  std::sort(stats.begin(), stats.end(),
            [](const PolicyStats& a, const PolicyStats& b) {
              return a.mean < b.mean;
            });
  return stats;
}

inline void write_comparison(const std::vector<PolicyStats>& stats,
                             std::ostream& out) {
  out << "policy,n,mean_ms,std_ms,gap_vs_gass_pct\n";
  char buf[128];
  for (const auto& s : stats) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%.4f\n",
                  s.policy.c_str(), s.n, s.mean, s.stddev, s.gap_vs_gass_pct);
    out << buf;
  }
}

}  // namespace saarp
