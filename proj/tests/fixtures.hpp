#pragma once

#include <set>
#include <utility>
#include <vector>

#include "saarp/application.hpp"
#include "saarp/evaluator.hpp"
#include "saarp/placement.hpp"
#include "saarp/topology.hpp"

namespace fixtures {

// Six-SBS worked example: a line of stations 100 m apart with radius 50 so
// device 1 attaches to SBS 1 and device 2 sits outside every cell.
inline saarp::HetNetTopology make_f1_topology() {
  std::vector<saarp::SbsNode> sbs;
  std::vector<int> caps = {2, 2, 1, 1, 1, 1};
  for (int j = 1; j <= 6; ++j)
    sbs.push_back({j, 100.0 * j, 0.0, 50.0, caps[static_cast<std::size_t>(j - 1)]});
  std::vector<saarp::Device> devices = {{1, 100.0, 10.0}, {2, 10000.0, 10000.0}};
  std::set<std::pair<int, int>> edges = {{1, 2}, {1, 3}, {2, 4},
                                         {2, 5}, {3, 5}, {4, 6}, {5, 6}};
  return saarp::HetNetTopology(std::move(sbs), std::move(devices),
                               std::move(edges));
}

// Four-microservice chain with candidate counts (2, 1, 2, 2).
inline saarp::ApplicationSpec make_f1_spec() {
  return saarp::ApplicationSpec({2, 1, 2, 2});
}

// Unit-cost timing: 1 kbit requests on 1 ms/kbit links, 5 ms per wired hop,
// 100 ms backbone, every execution 1 ms.
inline saarp::TimingParams make_t1_params(const saarp::HetNetTopology& topology,
                                          const saarp::ApplicationSpec& spec) {
  saarp::TimingParams p;
  p.alpha.assign(static_cast<std::size_t>(topology.device_count()), 1.0);
  p.d_sbs = 1.0;
  p.d_mbs = 1.0;
  p.beta = 5.0;
  p.tau_b = 100.0;
  p.exec_sbs.assign(static_cast<std::size_t>(topology.sbs_count()),
                    std::vector<double>(
                        static_cast<std::size_t>(spec.total_candidates()), 1.0));
  p.exec_cloud.assign(static_cast<std::size_t>(spec.total_candidates()), 1.0);
  return p;
}

// Reference placement: SBS 1 hosts {c11, c21}, SBS 2 hosts {c21, c31},
// SBS 6 hosts {c42}; everything else stays empty.
inline saarp::PlacementVector make_f1_placement(
    const saarp::HetNetTopology& topology, const saarp::ApplicationSpec& spec) {
  saarp::PlacementVector x = saarp::empty_placement(topology);
  x.slots[0] = {spec.global_index(1, 1), spec.global_index(2, 1)};
  x.slots[1] = {spec.global_index(2, 1), spec.global_index(3, 1)};
  x.slots[5] = {spec.global_index(4, 2)};
  return x;
}

struct TinyInstance {
  saarp::HetNetTopology topology;
  saarp::ApplicationSpec spec;
  saarp::TimingParams params;
};

// Small randomized instance for property tests: M <= m_max stations on a
// 1 km square, N devices, Q <= q_max microservices with <= c_max candidates.
inline TinyInstance random_tiny_instance(std::uint64_t seed, int m_max = 4,
                                         int q_max = 3, int c_max = 2,
                                         int n = 3, int b_max = 2) {
  saarp::RngStream rng(seed, /*stream_id=*/0x746573);
  int m = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(m_max)));
  int q = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(q_max)));
  auto topology = saarp::synth_generate(n, m, 1000.0, {150.0, 600.0},
                                        {0, b_max}, rng.next_u64());
  auto spec = saarp::random_spec(q, 1, c_max, rng.next_u64());
  auto params = saarp::make_timing_params(topology, spec, rng.next_u64());
  return {std::move(topology), std::move(spec), std::move(params)};
}

inline saarp::Scheme random_scheme(const saarp::ApplicationSpec& spec,
                                   saarp::RngStream& rng) {
  saarp::Scheme s(static_cast<std::size_t>(spec.q_count()));
  for (int q = 1; q <= spec.q_count(); ++q)
    s[static_cast<std::size_t>(q - 1)] = rng.uniform_int(1, spec.candidates(q));
  return s;
}

}  // namespace fixtures
