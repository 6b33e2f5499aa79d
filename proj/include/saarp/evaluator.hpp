#pragma once

#include <algorithm>
#include <cassert>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "saarp/application.hpp"
#include "saarp/placement.hpp"
#include "saarp/rng.hpp"
#include "saarp/topology.hpp"

namespace saarp {

// All times in milliseconds; data sizes in kbits. d_* are bandwidth
// reciprocals (ms per kbit), so a wireless transfer costs alpha * d.
struct TimingParams {
  std::vector<double> alpha;  // input stream size per device, kbits
  double d_sbs = 1.0;         // device <-> SBS link
  double d_mbs = 1.0;         // device <-> MBS link
  double beta = 5.0;          // per-hop wired cost
  double tau_b = 100.0;       // backbone one-way time
  std::vector<std::vector<double>> exec_sbs;  // [sbs][candidate]
  std::vector<double> exec_cloud;             // [candidate]

  double alpha_of(int device) const {
    return alpha[static_cast<std::size_t>(device - 1)];
  }
  double exec_at_sbs(int j, int g) const {
    return exec_sbs[static_cast<std::size_t>(j - 1)]
                   [static_cast<std::size_t>(g - 1)];
  }
  double exec_at_cloud(int g) const {
    return exec_cloud[static_cast<std::size_t>(g - 1)];
  }
};

// alpha per device and tau_exe per (node, candidate) are drawn once per
// instance and reused across all Monte Carlo samples.
inline TimingParams make_timing_params(const HetNetTopology& topology,
                                       const ApplicationSpec& spec,
                                       std::uint64_t seed,
                                       std::pair<double, double> alpha_range = {1.0, 8.0},
                                       std::pair<double, double> exec_range = {1.0, 2.0},
                                       double beta = 5.0, double tau_b = 100.0,
                                       double d_sbs = 1.0, double d_mbs = 1.0) {
  RngStream rng(seed, /*stream_id=*/0x74696d);
  TimingParams p;
  p.d_sbs = d_sbs;
  p.d_mbs = d_mbs;
  p.beta = beta;
  p.tau_b = tau_b;
  p.alpha.resize(static_cast<std::size_t>(topology.device_count()));
  for (auto& a : p.alpha)
    a = rng.uniform_real(alpha_range.first, alpha_range.second);
  p.exec_sbs.resize(static_cast<std::size_t>(topology.sbs_count()));
  for (auto& row : p.exec_sbs) {
    row.resize(static_cast<std::size_t>(spec.total_candidates()));
    for (auto& e : row)
      e = rng.uniform_real(exec_range.first, exec_range.second);
  }
  p.exec_cloud.resize(static_cast<std::size_t>(spec.total_candidates()));
  for (auto& e : p.exec_cloud)
    e = rng.uniform_real(exec_range.first, exec_range.second);
  return p;
}

// SBS id, or 0 for the cloud behind the MBS.
struct ProcessorLocation {
  int node = 0;
  bool is_cloud() const { return node == 0; }
  static ProcessorLocation cloud() { return {0}; }
  static ProcessorLocation at_sbs(int j) { return {j}; }
  bool operator==(const ProcessorLocation&) const = default;
};

// Per-candidate deployment sets precomputed from a placement; the hot path
// of every objective evaluation.
class DeploymentIndex {
 public:
  DeploymentIndex(const PlacementVector& x, const ApplicationSpec& spec)
      : sets_(static_cast<std::size_t>(spec.total_candidates())) {
    for (std::size_t j = 0; j < x.slots.size(); ++j)
      for (int g : x.slots[j])
        if (g != 0)
          sets_[static_cast<std::size_t>(g - 1)].push_back(
              static_cast<int>(j) + 1);
    for (auto& s : sets_) std::sort(s.begin(), s.end());
  }

  const std::vector<int>& set(int g) const {
    return sets_[static_cast<std::size_t>(g - 1)];
  }
  bool empty(int g) const { return set(g).empty(); }
  bool contains(int g, int j) const {
    const auto& s = set(g);
    return std::binary_search(s.begin(), s.end(), j);
  }

  // argmin_{j in D(g)} zeta(from, j); ties go to the smallest SBS id
  // (the set is kept ascending, so the first strict improvement wins).
  int nearest_deployment(const HetNetTopology& topology, int from,
                         int g) const {
    const int* row = topology.hop_row(from);
    int best = -1;
    int best_hops = std::numeric_limits<int>::max();
    for (int j : set(g)) {
      int h = row[j - 1];
      if (h < best_hops) {
        best_hops = h;
        best = j;
      }
    }
    return best;
  }

 private:
  std::vector<std::vector<int>> sets_;
};

// Processor of the first microservice's candidate for device i.
inline ProcessorLocation resolve_first_processor(
    const HetNetTopology& topology, const DeploymentIndex& dep, int i, int g) {
  if (!topology.covered(i) || dep.empty(g)) return ProcessorLocation::cloud();
  int jstar = topology.nearest(i);
  if (dep.contains(g, jstar)) return ProcessorLocation::at_sbs(jstar);
  return ProcessorLocation::at_sbs(dep.nearest_deployment(topology, jstar, g));
}

// Uplink of the first candidate. `resolved` must come from
// resolve_first_processor; when it is an SBS it already is the hop argmin.
inline double uplink_first(const HetNetTopology& topology,
                           const TimingParams& params, int i, int /*g*/,
                           ProcessorLocation resolved) {
  if (!topology.covered(i))
    return params.alpha_of(i) * params.d_mbs + params.tau_b;
  int jstar = topology.nearest(i);
  double wireless = params.alpha_of(i) * params.d_sbs;
  if (resolved.is_cloud()) return wireless + params.tau_b;  // D(g) empty
  if (resolved.node == jstar) return wireless;
  return wireless + params.beta * topology.hop_count(jstar, resolved.node);
}

// Processor of a subsequent candidate; once on the cloud the chain stays
// there (no backhaul into the HetNet).
inline ProcessorLocation resolve_next_processor(const HetNetTopology& topology,
                                                const DeploymentIndex& dep,
                                                ProcessorLocation prev,
                                                int g) {
  if (prev.is_cloud() || dep.empty(g)) return ProcessorLocation::cloud();
  if (dep.contains(g, prev.node)) return prev;
  return ProcessorLocation::at_sbs(
      dep.nearest_deployment(topology, prev.node, g));
}

inline double uplink_next(const HetNetTopology& topology,
                          const TimingParams& params, ProcessorLocation prev,
                          int /*g*/, ProcessorLocation resolved) {
  if (prev.is_cloud()) return 0.0;
  if (resolved.is_cloud()) return params.tau_b;  // D(g) empty, SBS -> cloud
  if (resolved.node == prev.node) return 0.0;
  return params.beta * topology.hop_count(prev.node, resolved.node);
}

// Downlink after the last microservice, back to device i.
inline double downlink_last(const HetNetTopology& topology,
                            const TimingParams& params, int i,
                            ProcessorLocation last) {
  if (!topology.covered(i)) {
    assert(last.is_cloud());
    return params.tau_b + params.alpha_of(i) * params.d_mbs;
  }
  if (last.is_cloud()) return params.tau_b + params.alpha_of(i) * params.d_mbs;
  int jstar = topology.nearest(i);
  return params.beta * topology.hop_count(last.node, jstar) +
         params.alpha_of(i) * params.d_sbs;
}

struct ResponseBreakdown {
  struct Step {
    double uplink = 0.0;
    ProcessorLocation processor;
    double exec = 0.0;
  };
  std::vector<Step> steps;
  double downlink = 0.0;
  double total = 0.0;  // sum(uplink + exec) + downlink, same summation order
};

inline double exec_time(const TimingParams& params, ProcessorLocation where,
                        int g) {
  return where.is_cloud() ? params.exec_at_cloud(g)
                          : params.exec_at_sbs(where.node, g);
}

// Total response time of device i under `scheme`; allocation-free hot path.
inline double device_total(const HetNetTopology& topology,
                           const DeploymentIndex& dep,
                           const TimingParams& params,
                           const ApplicationSpec& spec, int i,
                           const Scheme& scheme) {
  ProcessorLocation proc;
  double total = 0.0;
  for (int q = 1; q <= spec.q_count(); ++q) {
    int g = spec.global_index(q, scheme[static_cast<std::size_t>(q - 1)]);
    if (q == 1) {
      proc = resolve_first_processor(topology, dep, i, g);
      total += uplink_first(topology, params, i, g, proc);
    } else {
      ProcessorLocation next = resolve_next_processor(topology, dep, proc, g);
      total += uplink_next(topology, params, proc, g, next);
      proc = next;
    }
    total += exec_time(params, proc, g);
  }
  total += downlink_last(topology, params, i, proc);
  return total;
}

inline ResponseBreakdown device_response_time(const HetNetTopology& topology,
                                              const DeploymentIndex& dep,
                                              const TimingParams& params,
                                              const ApplicationSpec& spec,
                                              int i, const Scheme& scheme) {
  if (static_cast<int>(scheme.size()) != spec.q_count())
    throw std::invalid_argument("scheme length must equal Q");
  ResponseBreakdown out;
  out.steps.reserve(static_cast<std::size_t>(spec.q_count()));
  ProcessorLocation proc;
  for (int q = 1; q <= spec.q_count(); ++q) {
    int g = spec.global_index(q, scheme[static_cast<std::size_t>(q - 1)]);
    ResponseBreakdown::Step step;
    if (q == 1) {
      proc = resolve_first_processor(topology, dep, i, g);
      step.uplink = uplink_first(topology, params, i, g, proc);
    } else {
      ProcessorLocation next = resolve_next_processor(topology, dep, proc, g);
      step.uplink = uplink_next(topology, params, proc, g, next);
      proc = next;
    }
    step.processor = proc;
    step.exec = exec_time(params, proc, g);
    out.steps.push_back(step);
    // Accumulation order matches device_total exactly: uplink, then exec.
    out.total += step.uplink;
    out.total += step.exec;
  }
  out.downlink = downlink_last(topology, params, i, proc);
  out.total += out.downlink;
  return out;
}

inline ResponseBreakdown device_response_time(const HetNetTopology& topology,
                                              const PlacementVector& x,
                                              const TimingParams& params,
                                              const ApplicationSpec& spec,
                                              int i, const Scheme& scheme) {
  return device_response_time(topology, DeploymentIndex(x, spec), params, spec,
                              i, scheme);
}

// G(x, W): total response time over all devices; summation order is fixed
// ascending in device id so results are bit-stable.
inline double sample_objective(const HetNetTopology& topology,
                               const DeploymentIndex& dep,
                               const TimingParams& params,
                               const ApplicationSpec& spec,
                               const CompositionBatch& batch) {
  if (static_cast<int>(batch.size()) != topology.device_count())
    throw std::invalid_argument("batch size must equal device count");
  double sum = 0.0;
  for (int i = 1; i <= topology.device_count(); ++i)
    sum += device_total(topology, dep, params, spec, i,
                        batch[static_cast<std::size_t>(i - 1)]);
  return sum;
}

inline double sample_objective(const HetNetTopology& topology,
                               const PlacementVector& x,
                               const TimingParams& params,
                               const ApplicationSpec& spec,
                               const CompositionBatch& batch) {
  return sample_objective(topology, DeploymentIndex(x, spec), params, spec,
                          batch);
}

// g_hat_R(x): mean of G over the R sampled batches, ascending in r.
inline double saa_objective(const HetNetTopology& topology,
                            const DeploymentIndex& dep,
                            const TimingParams& params,
                            const ApplicationSpec& spec,
                            const std::vector<CompositionBatch>& batches) {
  if (batches.empty()) throw std::invalid_argument("R must be >= 1");
  double sum = 0.0;
  for (const auto& batch : batches)
    sum += sample_objective(topology, dep, params, spec, batch);
  return sum / static_cast<double>(batches.size());
}

inline double saa_objective(const HetNetTopology& topology,
                            const PlacementVector& x,
                            const TimingParams& params,
                            const ApplicationSpec& spec,
                            const std::vector<CompositionBatch>& batches) {
  return saa_objective(topology, DeploymentIndex(x, spec), params, spec,
                       batches);
}

// Debug trace for one batch: `device,q,processor,uplink_ms,exec_ms` rows and
// one `device,downlink,...` row per device.
inline void export_trace(const HetNetTopology& topology,
                         const PlacementVector& x, const TimingParams& params,
                         const ApplicationSpec& spec,
                         const CompositionBatch& batch, std::ostream& out) {
  DeploymentIndex dep(x, spec);
  out << "device,q,processor,uplink_ms,exec_ms\n";
  for (int i = 1; i <= topology.device_count(); ++i) {
    auto breakdown = device_response_time(
        topology, dep, params, spec, i, batch[static_cast<std::size_t>(i - 1)]);
    for (std::size_t q = 0; q < breakdown.steps.size(); ++q) {
      const auto& s = breakdown.steps[q];
      out << i << "," << (q + 1) << ","
          << (s.processor.is_cloud() ? std::string("cloud")
                                     : std::to_string(s.processor.node))
          << "," << s.uplink << "," << s.exec << "\n";
    }
    out << i << ",downlink,," << breakdown.downlink << ",\n";
  }
}

}  // namespace saarp
