#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saarp/experiment.hpp"

namespace {

void add_config_flags(CLI::App* cmd, saarp::ExperimentConfig& cfg) {
  cmd->add_option("--Q", cfg.Q, "microservices in the chain");
  cmd->add_option("--c-min", cfg.c_min, "min candidates per microservice");
  cmd->add_option("--c-max", cfg.c_max, "max candidates per microservice");
  cmd->add_option("--N", cfg.N, "mobile devices");
  cmd->add_option("--M", cfg.M, "small-cell base stations");
  cmd->add_option("--b-min", cfg.b_min, "min SBS capacity");
  cmd->add_option("--b-max", cfg.b_max, "max SBS capacity");
  cmd->add_option("--radius-min", cfg.radius_min, "min coverage radius, m");
  cmd->add_option("--radius-max", cfg.radius_max, "max coverage radius, m");
  cmd->add_option("--max-diameter", cfg.max_diameter, "SBS graph hop diameter cap");
  cmd->add_option("--area", cfg.area, "synthetic square side, m");
  cmd->add_option("--alpha-min", cfg.alpha_min, "min request size, kbits");
  cmd->add_option("--alpha-max", cfg.alpha_max, "max request size, kbits");
  cmd->add_option("--beta", cfg.beta, "per-hop wired cost, ms");
  cmd->add_option("--tau-b", cfg.tau_b, "backbone one-way time, ms");
  cmd->add_option("--exec-min", cfg.exec_min, "min execution time, ms");
  cmd->add_option("--exec-max", cfg.exec_max, "max execution time, ms");
  cmd->add_option("--d-sbs", cfg.d_sbs, "device-SBS ms per kbit");
  cmd->add_option("--d-mbs", cfg.d_mbs, "device-MBS ms per kbit");
  cmd->add_option("--R", cfg.R, "training sample size");
  cmd->add_option("--R-prime", cfg.R_prime, "evaluation sample size");
  cmd->add_option("--L", cfg.L, "replications");
  cmd->add_option("--epsilon", cfg.epsilon, "gap tolerance, ms");
  cmd->add_option("--escalation", cfg.escalation, "sample-size multiplier");
  cmd->add_option("--max-rounds", cfg.max_rounds, "escalation rounds cap");
  cmd->add_option("--P", cfg.P, "GA population size");
  cmd->add_option("--it", cfg.iterations, "GA iterations");
  cmd->add_option("--P-m", cfg.P_m, "mutation probability");
  cmd->add_option("--P-c", cfg.P_c, "crossover probability");
  cmd->add_option("--dataset", cfg.dataset, "geolocation CSV (id,kind,lat,lon)");
  cmd->add_flag("--synth", cfg.synth, "generate a synthetic instance");
  cmd->add_option("--outdir", cfg.outdir, "output directory");
  cmd->add_option("--eval-R", cfg.eval_R,
                  "held-out sample count (default R-prime)");
}

struct SweepSpec {
  std::string param;
  std::vector<int> values;
};

SweepSpec parse_sweep(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos)
    throw saarp::UsageError("sweep spec must look like name=1..5 or name=a,b,c");
  SweepSpec spec;
  spec.param = text.substr(0, eq);
  std::string rhs = text.substr(eq + 1);
  auto dots = rhs.find("..");
  try {
    if (dots != std::string::npos) {
      int lo = std::stoi(rhs.substr(0, dots));
      int hi = std::stoi(rhs.substr(dots + 2));
      if (lo > hi) throw saarp::UsageError("sweep range is empty");
      for (int v = lo; v <= hi; ++v) spec.values.push_back(v);
    } else {
      std::stringstream ss(rhs);
      std::string item;
      while (std::getline(ss, item, ',')) spec.values.push_back(std::stoi(item));
    }
  } catch (const saarp::UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw saarp::UsageError("malformed sweep values '" + rhs + "'");
  }
  if (spec.values.empty()) throw saarp::UsageError("sweep has no values");
  return spec;
}

void apply_sweep_value(saarp::ExperimentConfig& cfg, const std::string& param,
                       int v) {
  if (param == "b_mean") {
    cfg.b_min = cfg.b_max = v;
  } else if (param == "Q") {
    cfg.Q = v;
  } else if (param == "N") {
    cfg.N = v;
  } else if (param == "M") {
    cfg.M = v;
  } else if (param == "R") {
    cfg.R = static_cast<std::size_t>(v);
  } else if (param == "c_mean") {
    cfg.c_min = cfg.c_max = v;
  } else {
    throw saarp::UsageError("unknown sweep parameter '" + param + "'");
  }
}

int dispatch(int argc, char** argv) {
  CLI::App app{"SAA-RP: redundant microservice placement experiments"};
  app.require_subcommand(1);

  saarp::ExperimentConfig cfg;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> policies;
  std::string sweep_text;
  std::vector<std::string> summary_files;
  std::string compare_out;

  auto* gen = app.add_subcommand("gen", "generate topology/model files");
  add_config_flags(gen, cfg);
  gen->add_option("--seed", seeds, "instance seed")->required();

  auto* run = app.add_subcommand("run", "run policies on instances");
  add_config_flags(run, cfg);
  run->add_option("--policy", policies, "policy name (repeatable)")->required();
  run->add_option("--seed", seeds, "instance seed (repeatable)")->required();

  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  add_config_flags(sweep, cfg);
  sweep->add_option("--sweep", sweep_text, "e.g. b_mean=1..5 or Q=5,10,15,20")
      ->required();
  sweep->add_option("--policy", policies, "policy name (repeatable)")->required();
  sweep->add_option("--seed", seeds, "instance seed (repeatable)")->required();

  auto* compare =
      app.add_subcommand("compare", "rank policies from summary CSVs");
  compare->add_option("summaries", summary_files, "summary CSV files")
      ->required();
  compare->add_option("--out", compare_out, "write ranking CSV here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    std::filesystem::create_directories(cfg.outdir);
    for (std::uint64_t seed : seeds) {
      auto inst = saarp::build_instance(cfg, seed);
      inst.topology.export_snapshot_file(cfg.outdir + "/topology_" +
                                         std::to_string(seed) + ".csv");
      inst.model.save_file(cfg.outdir + "/model_" + std::to_string(seed) +
                           ".txt");
      std::cout << "instance " << inst.id << " seed " << seed << ": M="
                << inst.topology.sbs_count() << " N="
                << inst.topology.device_count() << " G="
                << inst.spec.total_candidates() << "\n";
    }
    return 0;
  }

  if (run->parsed()) {
    cfg.policies = policies;
    cfg.seeds = seeds;
    auto rows = saarp::run_experiment(cfg);
    saarp::write_summary(rows, std::cout);
    return 0;
  }

  if (sweep->parsed()) {
    auto spec = parse_sweep(sweep_text);
    std::vector<saarp::SummaryRow> all;
    for (int v : spec.values) {
      saarp::ExperimentConfig sub = cfg;
      apply_sweep_value(sub, spec.param, v);
      sub.policies = policies;
      sub.seeds = seeds;
      sub.outdir = cfg.outdir + "/" + spec.param + "_" + std::to_string(v);
      auto rows = saarp::run_experiment(sub);
      all.insert(all.end(), rows.begin(), rows.end());
    }
    std::filesystem::create_directories(cfg.outdir);
    std::ofstream out(cfg.outdir + "/sweep_summary.csv");
    if (!out)
      throw std::runtime_error("cannot open " + cfg.outdir + "/sweep_summary.csv");
    saarp::write_summary(all, out);
    saarp::write_summary(all, std::cout);
    return 0;
  }

  // compare
  std::vector<saarp::SummaryRow> rows;
  for (const auto& path : summary_files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto file_rows = saarp::read_summary(in);
    rows.insert(rows.end(), file_rows.begin(), file_rows.end());
  }
  auto stats = saarp::compare(rows);
  if (compare_out.empty()) {
    saarp::write_comparison(stats, std::cout);
  } else {
    std::ofstream out(compare_out);
    if (!out) throw std::runtime_error("cannot open " + compare_out);
    saarp::write_comparison(stats, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const saarp::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
