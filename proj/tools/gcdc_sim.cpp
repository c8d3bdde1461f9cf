// Command-line front end for the gradient-coding simulator.

#include "gcdc/assignment.hpp"
#include "gcdc/engine.hpp"
#include "gcdc/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct Flags {
  int workers = 0;
  int clusters = 0;
  int load = 0;
  int replication = 0;
  int iterations = 0;
  int runs = 0;
  std::uint64_t seed = 0;
  std::string schemes;
  std::string model;
  double switch_prob = 0;
  double mu_slow = 0;
  double mu_fast = 0;
  double alpha = 0;
  double tau = 0;
  std::string ssi;
  int initial_stragglers = 0;
  int threads = 0;
  std::string out;
  std::string config;
  std::vector<std::pair<CLI::Option*, std::function<void(gcdc::ExperimentConfig&)>>> setters;
};

void add_experiment_flags(CLI::App* app, Flags& f) {
  auto bind = [&](CLI::Option* opt, std::function<void(gcdc::ExperimentConfig&)> apply) {
    f.setters.emplace_back(opt, std::move(apply));
  };
  app->add_option("--config", f.config, "JSON config; explicit flags override it")->check(CLI::ExistingFile);
  bind(app->add_option("--workers", f.workers, "number of workers K"), [&f](auto& c) { c.workers = f.workers; });
  bind(app->add_option("--clusters", f.clusters, "number of clusters P"), [&f](auto& c) { c.clusters = f.clusters; });
  bind(app->add_option("--load", f.load, "computation load r"), [&f](auto& c) { c.load = f.load; });
  bind(app->add_option("--replication", f.replication, "clusters per worker n"),
       [&f](auto& c) { c.replication = f.replication; });
  bind(app->add_option("--iterations", f.iterations, "iterations per run T"),
       [&f](auto& c) { c.iterations = f.iterations; });
  bind(app->add_option("--runs", f.runs, "independent runs"), [&f](auto& c) { c.runs = f.runs; });
  bind(app->add_option("--seed", f.seed, "master seed"), [&f](auto& c) { c.seed = f.seed; });
  bind(app->add_option("--schemes", f.schemes, "comma list of GC,GC-SC,GC-DC,LB"),
       [&f](auto& c) { c.schemes = gcdc::parse_schemes(f.schemes); });
  bind(app->add_option("--model", f.model, "ge-homogeneous | ge-heterogeneous | time-varying")
           ->check(CLI::IsMember({"ge-homogeneous", "ge-heterogeneous", "time-varying"})),
       [&f](auto& c) { c.straggler.model = gcdc::parse_straggler_model(f.model); });
  bind(app->add_option("--switch-prob", f.switch_prob, "state switch probability p"),
       [&f](auto& c) { c.straggler.switch_prob = f.switch_prob; });
  bind(app->add_option("--mu-slow", f.mu_slow, "slow-state rate"), [&f](auto& c) { c.straggler.mu_slow = f.mu_slow; });
  bind(app->add_option("--mu-fast", f.mu_fast, "fast-state rate"), [&f](auto& c) { c.straggler.mu_fast = f.mu_fast; });
  bind(app->add_option("--alpha", f.alpha, "latency shift per partial gradient"),
       [&f](auto& c) { c.straggler.alpha = f.alpha; });
  bind(app->add_option("--tau", f.tau, "straggling threshold"), [&f](auto& c) { c.straggler.tau = f.tau; });
  bind(app->add_option("--ssi", f.ssi, "perfect | imperfect")->check(CLI::IsMember({"perfect", "imperfect"})),
       [&f](auto& c) { c.straggler.ssi = gcdc::parse_ssi(f.ssi); });
  bind(app->add_option("--initial-stragglers", f.initial_stragglers, "workers starting slow"),
       [&f](auto& c) { c.straggler.initial_stragglers = f.initial_stragglers; });
  bind(app->add_option("--threads", f.threads, "worker threads, 0 = all cores"),
       [&f](auto& c) { c.threads = f.threads; });
  bind(app->add_option("--out", f.out, "output directory"), [&f](auto& c) { c.out_dir = f.out; });
}

gcdc::ExperimentConfig resolve(const Flags& f) {
  gcdc::ExperimentConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    cfg = gcdc::config_from_json(nlohmann::json::parse(in), cfg);
  }
  for (const auto& [opt, apply] : f.setters) {
    if (opt->count() > 0) apply(cfg);
  }
  return cfg;
}

void print_summary(const std::vector<gcdc::SchemeSummary>& summary) {
  for (const auto& s : summary) {
    std::cout << gcdc::to_string(s.scheme) << "  mean=" << s.mean << "  std=" << s.std;
    if (s.improvement_vs_gcsc) std::cout << "  improvement_vs_gcsc=" << *s.improvement_vs_gcsc;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient coding simulator: GC, GC-SC and GC-DC completion times"};
  app.require_subcommand(1);

  Flags run_flags;
  bool verify = false;
  bool dump_placements = false;
  auto* run = app.add_subcommand("run", "run an experiment and write data.csv and summary.csv");
  add_experiment_flags(run, run_flags);
  run->add_flag("--verify-gradients", verify, "decode every iteration and check the recovered gradient");
  run->add_flag("--dump-placements", dump_placements, "also write placements.csv");

  Flags dump_flags;
  auto* dump = app.add_subcommand("dump-assignment", "write cluster assignment, data assignment and codebook JSON");
  add_experiment_flags(dump, dump_flags);

  Flags trace_flags;
  int trace_run = 0;
  auto* trace = app.add_subcommand("dump-trace", "write one run's straggler trace as CSV");
  add_experiment_flags(trace, trace_flags);
  trace->add_option("--run", trace_run, "run index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto cfg = resolve(run_flags);
      if (verify) cfg.verify_gradients = true;
      const auto result = gcdc::run_experiment(cfg);
      const std::filesystem::path out = cfg.out_dir;
      gcdc::write_csv(result.records, out / "data.csv");
      gcdc::write_summary_csv(result.summary, out / "summary.csv");
      if (dump_placements) gcdc::write_placements_csv(result.records, out / "placements.csv");
      print_summary(result.summary);
      if (cfg.verify_gradients) std::cout << "max gradient recovery error " << result.max_recovery_error << '\n';
    } else if (dump->parsed()) {
      const auto cfg = resolve(dump_flags);
      const auto setup = gcdc::make_setup(cfg);
      const auto codes = gcdc::build_codebook(cfg.workers, cfg.clusters, cfg.load);
      const nlohmann::json doc = {
          {"config", gcdc::config_to_json(cfg)},
          {"feasible", gcdc::feasibility_check(cfg.workers, cfg.clusters, cfg.replication)},
          {"static", gcdc::assignment_to_json(setup.static_matrix,
                                              gcdc::derive_data_assignment(setup.static_matrix, codes))},
          {"dynamic", gcdc::assignment_to_json(setup.dynamic_matrix,
                                               gcdc::derive_data_assignment(setup.dynamic_matrix, codes))},
          {"codebook", gcdc::codebook_to_json(codes)}};
      const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "assignment.json";
      std::filesystem::create_directories(path.parent_path());
      std::ofstream(path) << doc.dump(2) << '\n';
      std::cout << "wrote " << path.string() << '\n';
    } else if (trace->parsed()) {
      const auto cfg = resolve(trace_flags);
      const std::filesystem::path path =
          std::filesystem::path(cfg.out_dir) / ("trace_run" + std::to_string(trace_run) + ".csv");
      gcdc::write_trace_csv(gcdc::straggler_trace(cfg, trace_run), path);
      std::cout << "wrote " << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
