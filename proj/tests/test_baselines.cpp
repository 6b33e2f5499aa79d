#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "saarp/baselines.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace saarp;

namespace {

int total_copies(const PlacementVector& x, int g) {
  int n = 0;
  for (const auto& s : x.slots)
    for (int v : s)
      if (v == g) ++n;
  return n;
}

int capacity_sum(const HetNetTopology& topology) {
  int sum = 0;
  for (const auto& s : topology.sbs_list()) sum += s.capacity;
  return sum;
}

}  // namespace

TEST_CASE("rp1 places each candidate once until capacity runs out") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = fixtures::random_tiny_instance(seed, 5, 3, 3, 2, 3);
    auto x = rp1(inst.topology, inst.spec, seed);
    REQUIRE_FALSE(validate(x, inst.topology, inst.spec).has_value());
    int placed = 0;
    for (int g = 1; g <= inst.spec.total_candidates(); ++g) {
      int copies = total_copies(x, g);
      REQUIRE(copies <= 1);
      placed += copies;
    }
    CHECK(placed ==
          std::min(inst.spec.total_candidates(), capacity_sum(inst.topology)));
    // Candidates are handled in global order: a skipped candidate means
    // capacity was exhausted, so no later candidate may be placed.
    bool exhausted = false;
    for (int g = 1; g <= inst.spec.total_candidates(); ++g) {
      if (total_copies(x, g) == 0)
        exhausted = true;
      else
        REQUIRE_FALSE(exhausted);
    }
    CHECK(x == rp1(inst.topology, inst.spec, seed));  // deterministic per seed
  }
}

TEST_CASE("rp2 replicates candidates across distinct stations") {
  bool saw_redundancy = false;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = fixtures::random_tiny_instance(seed, 5, 3, 3, 2, 3);
    auto x = rp2(inst.topology, inst.spec, seed);
    REQUIRE_FALSE(validate(x, inst.topology, inst.spec).has_value());
    for (int g = 1; g <= inst.spec.total_candidates(); ++g) {
      auto dset = x.deployment_set(g, inst.spec);
      REQUIRE(static_cast<int>(dset.size()) <= inst.topology.sbs_count());
      if (dset.size() > 1) saw_redundancy = true;
    }
    CHECK(x == rp2(inst.topology, inst.spec, seed));
  }
  CHECK(saw_redundancy);
}

TEST_CASE("ga1 returns a valid single-copy placement") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = fixtures::random_tiny_instance(seed, 4, 3, 2, 4, 2);
    auto model = uniform_model(inst.spec, seed);
    RngStream rng(seed, 0x15);
    auto batches = model.sample_batch(inst.topology.device_count(), 8, rng);
    GaConfig c;
    c.iterations = 30;
    c.seed = seed;
    auto x = ga1(inst.topology, inst.spec, inst.params, batches, c);
    REQUIRE_FALSE(validate(x, inst.topology, inst.spec).has_value());
    for (int g = 1; g <= inst.spec.total_candidates(); ++g)
      REQUIRE(total_copies(x, g) <= 1);  // scenario #1: no redundancy
    CHECK(x == ga1(inst.topology, inst.spec, inst.params, batches, c));
  }
}

TEST_CASE("marginal probabilities come from an exact forward pass") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = random_spec(3, 1, 3, seed);
    auto model = uniform_model(spec, seed);
    auto marginals = marginal_probabilities(model);
    REQUIRE(static_cast<int>(marginals.size()) == spec.total_candidates());
    // Per microservice the marginals sum to 1.
    for (int q = 1; q <= spec.q_count(); ++q) {
      double sum = 0.0;
      for (int c = 1; c <= spec.candidates(q); ++c)
        sum += marginals[static_cast<std::size_t>(spec.global_index(q, c) - 1)];
      CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
    // And they match brute-force summation over all schemes.
    for (int q = 1; q <= spec.q_count(); ++q)
      for (int c = 1; c <= spec.candidates(q); ++c) {
        double brute = 0.0;
        for (const auto& s : model.enumerate_schemes())
          if (s[static_cast<std::size_t>(q - 1)] == c)
            brute += model.scheme_probability(s);
        CHECK_THAT(
            marginals[static_cast<std::size_t>(spec.global_index(q, c) - 1)],
            Catch::Matchers::WithinAbs(brute, 1e-9));
      }
  }
}

TEST_CASE("gp2 fills every station with the most popular candidates") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto inst = fixtures::random_tiny_instance(seed, 5, 3, 3, 2, 3);
    auto model = uniform_model(inst.spec, seed);
    auto x = gp2(inst.topology, inst.spec, model);
    REQUIRE_FALSE(validate(x, inst.topology, inst.spec).has_value());
    auto marginals = marginal_probabilities(model);
    for (int j = 1; j <= inst.topology.sbs_count(); ++j) {
      const auto& slots = x.slots[static_cast<std::size_t>(j - 1)];
      int used = 0;
      for (int v : slots)
        if (v != 0) ++used;
      // Full to capacity (or to the candidate pool).
      CHECK(used == std::min(inst.topology.sbs(j).capacity,
                             inst.spec.total_candidates()));
    }
    // All stations host the identical top-popularity prefix.
    for (int j = 2; j <= inst.topology.sbs_count(); ++j) {
      const auto& a = x.slots[0];
      const auto& b = x.slots[static_cast<std::size_t>(j - 1)];
      for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
        CHECK(a[k] == b[k]);
    }
    // The rank-1 block (first min(b_j, Q) entries) holds each
    // microservice's most probable candidate.
    if (!x.slots.empty() && !x.slots[0].empty() && x.slots[0][0] != 0) {
      int g0 = x.slots[0][0];
      for (int g = 1; g <= inst.spec.total_candidates(); ++g)
        CHECK(marginals[static_cast<std::size_t>(g0 - 1)] >=
              marginals[static_cast<std::size_t>(g - 1)] - 1e-12);
    }
  }
}

TEST_CASE("scenario ordering smoke test on one mid-size instance") {
  // Fuller statistical version lives in the acceptance suite; here only the
  // redundancy policies' validity and rough comparability are exercised.
  auto topology = synth_generate(30, 6, 1500.0, {250.0, 600.0}, {2, 3}, 5);
  auto spec = random_spec(4, 2, 3, 5);
  auto model = uniform_model(spec, 5);
  auto params = make_timing_params(topology, spec, 5);
  RngStream rng(5, 0x16);
  auto batches = model.sample_batch(topology.device_count(), 20, rng);

  auto score = [&](const PlacementVector& x) {
    return saa_objective(topology, x, params, spec, batches);
  };
  double v_gp2 = score(gp2(topology, spec, model));
  double v_rp1 = 0.0, v_rp2 = 0.0;
  const int draws = 20;
  for (int d = 0; d < draws; ++d) {
    v_rp1 += score(rp1(topology, spec, rng.next_u64()));
    v_rp2 += score(rp2(topology, spec, rng.next_u64()));
  }
  v_rp1 /= draws;
  v_rp2 /= draws;
  CHECK(v_gp2 > 0.0);
  CHECK(v_rp1 > 0.0);
  CHECK(v_rp2 > 0.0);
}
