#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "saarp/application.hpp"
#include "saarp/rng.hpp"
#include "saarp/topology.hpp"

namespace saarp {

using BigInt = boost::multiprecision::cpp_int;

// Per-SBS slot lists of global candidate indices; 0 marks an empty slot.
// The SBS capacity constraint holds by construction: slots[j] always has
// length b_j. Nonzero entries within one SBS are pairwise distinct, while
// the same candidate may appear on any number of SBSs (redundancy).
struct PlacementVector {
  // slots[j-1] belongs to SBS j.
  std::vector<std::vector<int>> slots;

  // D(g): SBS ids hosting global candidate g, ascending.
  std::vector<int> deployment_set(int g, const ApplicationSpec& spec) const {
    if (g < 1 || g > spec.total_candidates())
      throw std::out_of_range("global candidate index out of range");
    std::vector<int> out;
    for (std::size_t j = 0; j < slots.size(); ++j)
      if (std::find(slots[j].begin(), slots[j].end(), g) != slots[j].end())
        out.push_back(static_cast<int>(j) + 1);
    return out;
  }

  // Slot order within an SBS carries no meaning; sorting gives a canonical
  // form for equality and enumeration.
  PlacementVector canonical() const {
    PlacementVector c = *this;
    for (auto& s : c.slots) std::sort(s.begin(), s.end(), std::greater<int>());
    return c;
  }

  bool operator==(const PlacementVector&) const = default;
};

struct PlacementViolation {
  int sbs = 0;   // 1-based; 0 when the shape itself is wrong
  int slot = 0;  // 1-based slot position
  std::string message;
};

// Structured check of the encoding invariants; never throws.
inline std::optional<PlacementViolation> validate(
    const PlacementVector& x, const HetNetTopology& topology,
    const ApplicationSpec& spec) {
  if (static_cast<int>(x.slots.size()) != topology.sbs_count())
    return PlacementViolation{0, 0, "slot list count differs from SBS count"};
  for (int j = 1; j <= topology.sbs_count(); ++j) {
    const auto& s = x.slots[static_cast<std::size_t>(j - 1)];
    if (static_cast<int>(s.size()) != topology.sbs(j).capacity)
      return PlacementViolation{j, 0, "slot list length differs from capacity"};
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] < 0 || s[k] > spec.total_candidates())
        return PlacementViolation{j, static_cast<int>(k) + 1,
                                  "slot value out of range"};
      if (s[k] != 0)
        for (std::size_t k2 = 0; k2 < k; ++k2)
          if (s[k2] == s[k])
            return PlacementViolation{j, static_cast<int>(k) + 1,
                                      "duplicate candidate within SBS"};
    }
  }
  return std::nullopt;
}

// All-empty placement of the right shape.
inline PlacementVector empty_placement(const HetNetTopology& topology) {
  PlacementVector x;
  x.slots.resize(static_cast<std::size_t>(topology.sbs_count()));
  for (int j = 1; j <= topology.sbs_count(); ++j)
    x.slots[static_cast<std::size_t>(j - 1)].assign(
        static_cast<std::size_t>(topology.sbs(j).capacity), 0);
  return x;
}

// Resample one SBS's slot list: each slot uniform over {0} plus the
// candidates not already used within this SBS.
inline void resample_sbs_slots(std::vector<int>& slots,
                               const ApplicationSpec& spec, RngStream& rng) {
  std::vector<char> used(static_cast<std::size_t>(spec.total_candidates()) + 1,
                         0);
  std::vector<int> allowed;
  allowed.reserve(used.size());
  for (auto& v : slots) {
    allowed.clear();
    allowed.push_back(0);
    for (int g = 1; g <= spec.total_candidates(); ++g)
      if (!used[static_cast<std::size_t>(g)]) allowed.push_back(g);
    v = allowed[rng.uniform_index(allowed.size())];
    if (v != 0) used[static_cast<std::size_t>(v)] = 1;
  }
}

inline PlacementVector random_placement(const HetNetTopology& topology,
                                        const ApplicationSpec& spec,
                                        RngStream& rng) {
  PlacementVector x = empty_placement(topology);
  for (auto& s : x.slots) resample_sbs_slots(s, spec, rng);
  return x;
}

// Exact count of canonical placements: per SBS, sum over k of C(G, k)
// candidate subsets filling k of the b_j slots; product over SBSs.
inline BigInt solution_space_size(const HetNetTopology& topology,
                                  const ApplicationSpec& spec) {
  const int g = spec.total_candidates();
  BigInt total = 1;
  for (const auto& s : topology.sbs_list()) {
    BigInt per_sbs = 0;
    BigInt binom = 1;  // C(g, k)
    for (int k = 0; k <= std::min(s.capacity, g); ++k) {
      per_sbs += binom;
      binom = binom * (g - k) / (k + 1);
    }
    total *= per_sbs;
  }
  return total;
}

// CSV export `sbs_id,slot,global_candidate,microservice_q,candidate_c`;
// empty slots are omitted.
inline void export_placement(const PlacementVector& x,
                             const ApplicationSpec& spec, std::ostream& out) {
  out << "sbs_id,slot,global_candidate,microservice_q,candidate_c\n";
  for (std::size_t j = 0; j < x.slots.size(); ++j)
    for (std::size_t k = 0; k < x.slots[j].size(); ++k) {
      int g = x.slots[j][k];
      if (g == 0) continue;
      auto [q, c] = spec.locate(g);
      out << (j + 1) << "," << (k + 1) << "," << g << "," << q << "," << c
          << "\n";
    }
}

inline void export_placement_file(const PlacementVector& x,
                                  const ApplicationSpec& spec,
                                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  export_placement(x, spec, out);
}

}  // namespace saarp
