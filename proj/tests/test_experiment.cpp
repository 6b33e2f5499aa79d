#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "saarp/experiment.hpp"

using namespace saarp;

namespace {

// Desk-scale configuration so the full grid runs in well under a second.
ExperimentConfig tiny_config(const std::string& outdir) {
  ExperimentConfig cfg;
  cfg.Q = 2;
  cfg.c_min = 1;
  cfg.c_max = 2;
  cfg.N = 4;
  cfg.M = 3;
  cfg.b_min = 1;
  cfg.b_max = 2;
  cfg.R = 4;
  cfg.R_prime = 8;
  cfg.L = 2;
  cfg.max_rounds = 1;
  cfg.iterations = 15;
  cfg.eval_R = 10;
  cfg.policy_draws = 5;
  cfg.outdir = outdir;
  return cfg;
}

// Summary text with the wall-clock column blanked; wall time is the one
// field that legitimately varies between identical runs.
std::string masked_summary(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = [&] {
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) f.push_back(field);
      return f;
    }();
    if (fields.size() == 7 && fields[5] != "wall_ms") fields[5] = "-";
    for (std::size_t k = 0; k < fields.size(); ++k)
      out << (k ? "," : "") << fields[k];
    out << "\n";
  }
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("config validation and policy gating") {
  auto cfg = tiny_config("exp_bad");
  cfg.policies = {"gass"};
  cfg.seeds = {};
  CHECK_THROWS_AS(run_experiment(cfg), UsageError);
  cfg.seeds = {1};
  cfg.policies = {"definitely-not-a-policy"};
  CHECK_THROWS_AS(run_experiment(cfg), UsageError);
  cfg.policies = {"gass"};
  cfg.b_min = 5;
  cfg.b_max = 3;
  CHECK_THROWS_AS(run_experiment(cfg), UsageError);
}

TEST_CASE("missing dataset raises an I/O error, not a usage error") {
  auto cfg = tiny_config("exp_missing");
  cfg.dataset = "no-such-file.csv";
  cfg.policies = {"gp2"};
  cfg.seeds = {1};
  CHECK_THROWS_AS(run_experiment(cfg), std::runtime_error);
  try {
    run_experiment(cfg);
  } catch (const UsageError&) {
    FAIL("missing dataset must not be classified as a usage error");
  } catch (const std::runtime_error&) {
  }
}

TEST_CASE("full grid emits one summary row per (policy, seed) cell") {
  auto cfg = tiny_config("exp_grid");
  cfg.policies = {"gass", "saarp", "rp1", "rp2", "ga1", "gp2"};
  cfg.seeds = {1, 2};
  auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK(r.objective_ms > 0.0);
    CHECK(r.eval_R == 10);
    CHECK(r.config_hash == rows[0].config_hash);
  }
  // Same seed -> same instance id across policies; different seed differs.
  CHECK(rows[0].instance_id == rows[5].instance_id);
  CHECK(rows[0].instance_id != rows[6].instance_id);

  // Expected artifacts: traces for gass, outcome for saarp, placements for all.
  CHECK(std::filesystem::exists("exp_grid/summary.csv"));
  CHECK(std::filesystem::exists("exp_grid/trace_gass_1.csv"));
  CHECK(std::filesystem::exists("exp_grid/outcome_saarp_1.csv"));
  for (const auto& policy : cfg.policies)
    CHECK(std::filesystem::exists("exp_grid/placement_" + policy + "_2.csv"));

  // Round-trip through the CSV reader.
  std::ifstream in("exp_grid/summary.csv");
  auto parsed = read_summary(in);
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(parsed[k].policy == rows[k].policy);
    CHECK(parsed[k].objective_ms == rows[k].objective_ms);
  }
}

TEST_CASE("identical config and seeds reproduce identical outputs") {
  auto cfg1 = tiny_config("exp_repro_a");
  cfg1.policies = {"gass", "rp2", "gp2"};
  cfg1.seeds = {7};
  run_experiment(cfg1);
  auto cfg2 = cfg1;
  cfg2.outdir = "exp_repro_b";
  run_experiment(cfg2);
  CHECK(masked_summary("exp_repro_a/summary.csv") ==
        masked_summary("exp_repro_b/summary.csv"));
  CHECK(slurp("exp_repro_a/trace_gass_7.csv") ==
        slurp("exp_repro_b/trace_gass_7.csv"));
  CHECK(slurp("exp_repro_a/placement_rp2_7.csv") ==
        slurp("exp_repro_b/placement_rp2_7.csv"));
}

TEST_CASE("comparison ranks policies and reports gaps against gass") {
  std::vector<SummaryRow> rows;
  auto add = [&rows](const std::string& policy, std::uint64_t seed,
                     double objective) {
    rows.push_back({"inst" + std::to_string(seed), policy, seed, objective, 10,
                    1.0, "hash"});
  };
  add("gass", 1, 90.0);
  add("gass", 2, 110.0);
  add("gp2", 1, 117.0);
  add("gp2", 2, 115.4);
  add("rp1", 1, 300.0);
  add("rp1", 2, 292.0);
  auto stats = compare(rows);
  REQUIRE(stats.size() == 3);
  CHECK(stats[0].policy == "gass");
  CHECK(stats[1].policy == "gp2");
  CHECK(stats[2].policy == "rp1");
  CHECK(stats[0].gap_vs_gass_pct == 0.0);
  // mean(gp2)=116.2 vs mean(gass)=100 -> +16.2%
  CHECK_THAT(stats[1].gap_vs_gass_pct, Catch::Matchers::WithinAbs(16.2, 1e-9));
  CHECK(stats[1].n == 2);
  CHECK_THAT(stats[0].stddev,
             Catch::Matchers::WithinAbs(std::sqrt(200.0), 1e-9));

  std::ostringstream out;
  write_comparison(stats, out);
  CHECK(out.str().rfind("policy,n,mean_ms,std_ms,gap_vs_gass_pct\n", 0) == 0);
  CHECK(out.str().find("gp2,2,116.200000") != std::string::npos);
}

TEST_CASE("identical summaries compare at zero gap") {
  std::vector<SummaryRow> rows = {
      {"i1", "gass", 1, 100.0, 10, 1.0, "h"},
      {"i1", "gp2", 1, 100.0, 10, 1.0, "h"},
  };
  auto stats = compare(rows);
  for (const auto& s : stats) CHECK(s.gap_vs_gass_pct == 0.0);
}

TEST_CASE("comparing summaries from different instances is refused") {
  std::vector<SummaryRow> rows = {
      {"i1", "gass", 1, 100.0, 10, 1.0, "h"},
      {"i2", "gp2", 1, 100.0, 10, 1.0, "h"},
  };
  CHECK_THROWS_WITH(compare(rows),
                    Catch::Matchers::ContainsSubstring("different instances"));
}

TEST_CASE("config hash tracks every effective parameter") {
  auto a = tiny_config("x");
  auto b = a;
  CHECK(detail::fnv1a(detail::config_key(a)) ==
        detail::fnv1a(detail::config_key(b)));
  b.epsilon = 3e-4;
  CHECK(detail::fnv1a(detail::config_key(a)) !=
        detail::fnv1a(detail::config_key(b)));
  b = a;
  b.tau_b = 50.0;
  CHECK(detail::fnv1a(detail::config_key(a)) !=
        detail::fnv1a(detail::config_key(b)));
}
