#include "gcdc/engine.hpp"

#include "gcdc/latency.hpp"
#include "gcdc/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gcdc {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::GC: return "GC";
    case Scheme::GCSC: return "GC-SC";
    case Scheme::GCDC: return "GC-DC";
    case Scheme::LB: return "LB";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "GC" || name == "gc") return Scheme::GC;
  if (name == "GC-SC" || name == "gc-sc") return Scheme::GCSC;
  if (name == "GC-DC" || name == "gc-dc") return Scheme::GCDC;
  if (name == "LB" || name == "lb") return Scheme::LB;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::vector<Scheme> parse_schemes(const std::string& csv) {
  std::vector<Scheme> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_scheme(item));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (workers < 1 || clusters < 1 || workers % clusters != 0) throw std::invalid_argument("config: P must divide K");
  if (load < 1 || load > ell()) throw std::invalid_argument("config: need 1 <= r <= K/P");
  if (replication < 1 || replication > clusters) throw std::invalid_argument("config: need 1 <= n <= P");
  if (iterations < 1 || runs < 1) throw std::invalid_argument("config: iterations and runs must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("config: scheme list is empty");
  if (verify_gradients && (verify_dim < 1 || verify_size < workers)) {
    throw std::invalid_argument("config: verification needs d >= 1 and at least K data points");
  }
  straggler.validate();
  if (straggler.initial_stragglers > workers) throw std::invalid_argument("config: initial stragglers exceed K");
}

ExperimentSetup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentSetup s;
  s.cfg = cfg;
  s.static_matrix = static_assignment(cfg.workers, cfg.clusters);
  s.dynamic_matrix = dynamic_assignment_matrix(cfg.workers, cfg.clusters, cfg.replication,
                                               derive_seed({cfg.seed, stream::kMatrix}));
  s.static_clusters = static_placement(s.static_matrix);
  if (cfg.verify_gradients) {
    s.codes = build_codebook(cfg.workers, cfg.clusters, cfg.load);
    std::vector<int> all(static_cast<std::size_t>(cfg.workers));
    std::iota(all.begin(), all.end(), 0);
    s.gc_code = build_cluster_code<double>(0, all, cfg.load);
    SyntheticOptions opts;
    opts.dim = cfg.verify_dim;
    opts.train_size = cfg.verification_size();
    opts.test_size = std::max<Eigen::Index>(1, opts.train_size / 5);
    opts.seed = derive_seed({cfg.seed, stream::kData});
    s.data = std::make_shared<const Dataset<double>>(generate_synthetic<double>(opts).first);
    s.batches = partition(*s.data, cfg.workers);
  }
  return s;
}

Eigen::VectorXd decode_from_placement(const std::vector<ClusterCode<double>>& codes, const Placement& placement,
                                      const Eigen::VectorXd& draws,
                                      const std::vector<Eigen::VectorXd>& partial_gradients, int workers) {
  Eigen::VectorXd total;
  for (int p = 0; p < placement.clusters(); ++p) {
    const auto& members = placement.members[static_cast<std::size_t>(p)];
    const auto& code = codes[static_cast<std::size_t>(p)];
    std::vector<int> slots(members.size());
    std::iota(slots.begin(), slots.end(), 0);
    std::stable_sort(slots.begin(), slots.end(), [&](int a, int b) {
      return draws(members[static_cast<std::size_t>(a)]) < draws(members[static_cast<std::size_t>(b)]);
    });
    std::vector<ReceivedCodeword<double>> received;
    for (int i = 0; i < code.threshold(); ++i) {
      const int slot = slots[static_cast<std::size_t>(i)];
      received.push_back({slot, evaluate_codeword(code.codewords[static_cast<std::size_t>(slot)], partial_gradients)});
    }
    const Eigen::VectorXd cluster_avg = decode_cluster(code, received);
    const double weight = static_cast<double>(code.ell()) / workers;
    if (p == 0) {
      total = weight * cluster_avg;
    } else {
      total += weight * cluster_avg;
    }
  }
  return total;
}

double recovery_error(const Eigen::VectorXd& recovered, const Eigen::VectorXd& centralized,
                      const std::vector<Eigen::VectorXd>& partial_gradients) {
  double mean_norm = 0.0;
  for (const auto& g : partial_gradients) mean_norm += g.norm();
  if (!partial_gradients.empty()) mean_norm /= static_cast<double>(partial_gradients.size());
  const double scale = std::max({centralized.norm(), mean_norm, 1e-300});
  return (recovered - centralized).norm() / scale;
}

namespace {

Placement single_cluster(int workers) {
  Placement p;
  p.members.resize(1);
  p.members[0].resize(static_cast<std::size_t>(workers));
  std::iota(p.members[0].begin(), p.members[0].end(), 0);
  return p;
}

double placement_completion(const Placement& placement, const Eigen::VectorXd& draws, int ell, int load) {
  std::vector<double> cluster_times;
  cluster_times.reserve(placement.members.size());
  std::vector<double> times;
  for (const auto& members : placement.members) {
    times.clear();
    for (const int w : members) times.push_back(draws(w));
    cluster_times.push_back(cluster_completion(times, ell, load));
  }
  return iteration_completion(cluster_times);
}

}  // namespace

IterationRecord run_iteration(Scheme scheme, const ExperimentSetup& setup, const IterationInputs& in) {
  const auto& cfg = setup.cfg;
  IterationRecord rec;
  rec.run = in.run;
  rec.iteration = in.iteration;
  rec.scheme = scheme;
  const std::span<const double> draws(in.draws.data(), static_cast<std::size_t>(in.draws.size()));

  std::optional<Placement> placement;
  switch (scheme) {
    case Scheme::GC:
      rec.completion_time = gc_completion(draws, cfg.load);
      break;
    case Scheme::LB:
      rec.completion_time = lower_bound_completion(draws, cfg.clusters, cfg.ell(), cfg.load);
      break;
    case Scheme::GCSC:
      placement = setup.static_clusters;
      break;
    case Scheme::GCDC: {
      const PlacementMode mode = cfg.straggler.model == StragglerModel::HomogeneousGE ? PlacementMode::Homogeneous
                                                                                     : PlacementMode::Heterogeneous;
      try {
        placement = assign_clusters(setup.dynamic_matrix, in.observed, in.observed_rates, mode);
        rec.conflicts = placement->swaps;
      } catch (const NoResolution&) {
        placement = setup.static_clusters;
        rec.conflicts = -1;
      }
      break;
    }
  }

  if (placement) {
    rec.completion_time = placement_completion(*placement, in.draws, cfg.ell(), cfg.load);
    rec.cluster_stragglers = cluster_straggler_counts(*placement, in.realized);
    rec.placement = placement->members;
  } else {
    rec.cluster_stragglers = {static_cast<int>(std::count(in.realized.begin(), in.realized.end(), true))};
  }
  rec.max_cluster_stragglers = *std::max_element(rec.cluster_stragglers.begin(), rec.cluster_stragglers.end());

  if (in.partial_gradients != nullptr && scheme != Scheme::LB) {
    Eigen::VectorXd recovered;
    if (placement) {
      recovered = decode_from_placement(setup.codes, *placement, in.draws, *in.partial_gradients, cfg.workers);
    } else {
      recovered = decode_from_placement({*setup.gc_code}, single_cluster(cfg.workers), in.draws,
                                        *in.partial_gradients, cfg.workers);
    }
    rec.recovery_error = recovery_error(recovered, *in.centralized, *in.partial_gradients);
    if (!(rec.recovery_error <= kRecoveryTolerance)) {
      throw std::logic_error("gradient recovery failed for " + to_string(scheme) + " at run " +
                             std::to_string(in.run) + " iteration " + std::to_string(in.iteration) +
                             ": relative error " + std::to_string(rec.recovery_error));
    }
  }
  return rec;
}

namespace {

struct RunOutput {
  std::vector<IterationRecord> records;
  int fallbacks = 0;
  double max_recovery_error = 0.0;
};

RunOutput simulate_run(const ExperimentSetup& setup, int run) {
  const auto& cfg = setup.cfg;
  RunOutput out;
  out.records.reserve(static_cast<std::size_t>(cfg.iterations) * cfg.schemes.size());

  WorkerStreams streams(cfg.seed, static_cast<std::uint64_t>(run), cfg.workers);
  StragglerState prev = init_states(cfg.straggler, cfg.workers,
                                    derive_seed({cfg.seed, stream::kInit, static_cast<std::uint64_t>(run)}));

  std::optional<ModelState<double>> model;
  if (cfg.verify_gradients) {
    model = ModelState<double>{Eigen::VectorXd::Zero(setup.data->dim()), 0, cfg.eta};
  }

  for (int t = 1; t <= cfg.iterations; ++t) {
    StragglerState cur = step(prev, cfg.straggler, streams);
    const StragglerState& seen = observe(cur, prev, cfg.straggler.ssi);

    std::mt19937_64 latency_rng(derive_seed({cfg.seed, stream::kLatency, static_cast<std::uint64_t>(run),
                                             static_cast<std::uint64_t>(t)}));
    IterationInputs in;
    in.run = run;
    in.iteration = t;
    in.realized = straggler_flags(cur, cfg.straggler);
    in.observed = straggler_flags(seen, cfg.straggler);
    in.observed_rates = seen.rate;
    in.draws = sample_iteration(cur.rate, cfg.straggler.alpha, cfg.load, latency_rng);

    std::vector<Eigen::VectorXd> partials;
    Eigen::VectorXd centralized;
    if (model) {
      partials = partial_gradients(*setup.data, setup.batches, *model);
      centralized = centralized_gradient(*setup.data, *model);
      in.partial_gradients = &partials;
      in.centralized = &centralized;
    }

    for (const Scheme scheme : cfg.schemes) {
      IterationRecord rec = run_iteration(scheme, setup, in);
      if (rec.conflicts < 0) ++out.fallbacks;
      out.max_recovery_error = std::max(out.max_recovery_error, rec.recovery_error);
      out.records.push_back(std::move(rec));
    }
    if (model) model = gd_step(*model, centralized);
    prev = std::move(cur);
  }
  return out;
}

}  // namespace

std::vector<SchemeSummary> summarize(const std::vector<IterationRecord>& records, const std::vector<Scheme>& schemes,
                                     int runs) {
  std::vector<SchemeSummary> out;
  for (const Scheme scheme : schemes) {
    std::vector<double> sums(static_cast<std::size_t>(runs), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(runs), 0);
    for (const auto& r : records) {
      if (r.scheme != scheme) continue;
      sums[static_cast<std::size_t>(r.run)] += r.completion_time;
      ++counts[static_cast<std::size_t>(r.run)];
    }
    std::vector<double> run_means;
    for (int i = 0; i < runs; ++i) {
      if (counts[static_cast<std::size_t>(i)] > 0) {
        run_means.push_back(sums[static_cast<std::size_t>(i)] / counts[static_cast<std::size_t>(i)]);
      }
    }
    SchemeSummary s;
    s.scheme = scheme;
    if (!run_means.empty()) {
      s.mean = std::accumulate(run_means.begin(), run_means.end(), 0.0) / static_cast<double>(run_means.size());
      if (run_means.size() > 1) {
        double ss = 0.0;
        for (const double m : run_means) ss += (m - s.mean) * (m - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(run_means.size() - 1));
      }
    }
    out.push_back(s);
  }
  const auto gcsc = std::find_if(out.begin(), out.end(), [](const auto& s) { return s.scheme == Scheme::GCSC; });
  if (gcsc != out.end() && gcsc->mean > 0.0) {
    const double base = gcsc->mean;
    for (auto& s : out) s.improvement_vs_gcsc = (base - s.mean) / base;
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const ExperimentSetup setup = make_setup(cfg);
  const bool has_dc = std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::GCDC) != cfg.schemes.end();
  if (has_dc && !feasibility_check(cfg.workers, cfg.clusters, cfg.replication)) {
    std::clog << "warning: n=" << cfg.replication << " violates n > P(K-1)/(2K) for K=" << cfg.workers
              << ", P=" << cfg.clusters << "; unresolved iterations fall back to static clustering\n";
  }

  std::vector<RunOutput> outputs(static_cast<std::size_t>(cfg.runs));
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.runs);
  if (threads == 1) {
    for (int run = 0; run < cfg.runs; ++run) outputs[static_cast<std::size_t>(run)] = simulate_run(setup, run);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back([&, i] {
        try {
          for (int run = next++; run < cfg.runs; run = next++) {
            outputs[static_cast<std::size_t>(run)] = simulate_run(setup, run);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ExperimentResult result;
  result.static_matrix = setup.static_matrix;
  result.dynamic_matrix = setup.dynamic_matrix;
  for (auto& o : outputs) {
    result.fallbacks += o.fallbacks;
    result.max_recovery_error = std::max(result.max_recovery_error, o.max_recovery_error);
    std::move(o.records.begin(), o.records.end(), std::back_inserter(result.records));
  }
  if (result.fallbacks > 0) {
    std::clog << "warning: " << result.fallbacks << " GC-DC iterations fell back to static clustering\n";
  }
  result.summary = summarize(result.records, cfg.schemes, cfg.runs);
  return result;
}

std::vector<StragglerState> straggler_trace(const ExperimentConfig& cfg, int run) {
  cfg.validate();
  WorkerStreams streams(cfg.seed, static_cast<std::uint64_t>(run), cfg.workers);
  std::vector<StragglerState> trace;
  trace.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  trace.push_back(init_states(cfg.straggler, cfg.workers,
                              derive_seed({cfg.seed, stream::kInit, static_cast<std::uint64_t>(run)})));
  for (int t = 1; t <= cfg.iterations; ++t) trace.push_back(step(trace.back(), cfg.straggler, streams));
  return trace;
}

}  // namespace gcdc
