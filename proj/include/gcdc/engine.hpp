#pragma once

#include "gcdc/assignment.hpp"
#include "gcdc/code.hpp"
#include "gcdc/dataset.hpp"
#include "gcdc/scheduler.hpp"
#include "gcdc/straggler.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gcdc {

enum class Scheme { GC, GCSC, GCDC, LB };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);
std::vector<Scheme> parse_schemes(const std::string& csv);

struct ExperimentConfig {
  int workers = 12;
  int clusters = 4;
  int load = 2;
  int replication = 2;
  int iterations = 400;
  int runs = 30;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes{Scheme::GC, Scheme::GCSC, Scheme::GCDC, Scheme::LB};
  StragglerConfig straggler;
  bool verify_gradients = false;
  Eigen::Index verify_dim = 100;
  Eigen::Index verify_size = 400;
  double eta = 0.1;
  // 0 = hardware concurrency, 1 = single-threaded.
  int threads = 0;
  std::string out_dir = "out";

  int ell() const { return workers / clusters; }
  /// verify_size trimmed down to a multiple of K so batches stay equal-sized.
  Eigen::Index verification_size() const { return verify_size - verify_size % workers; }
  void validate() const;
};

struct IterationRecord {
  int run = 0;
  int iteration = 0;
  Scheme scheme = Scheme::GC;
  double completion_time = 0.0;
  int max_cluster_stragglers = 0;
  // Phase II swaps for GC-DC; -1 marks an iteration that fell back to the
  // static placement.
  int conflicts = 0;
  std::vector<int> cluster_stragglers;
  std::vector<std::vector<int>> placement;
  double recovery_error = 0.0;
};

struct SchemeSummary {
  Scheme scheme = Scheme::GC;
  double mean = 0.0;
  double std = 0.0;
  std::optional<double> improvement_vs_gcsc;
};

struct ExperimentResult {
  std::vector<IterationRecord> records;
  std::vector<SchemeSummary> summary;
  ClusterAssignmentMatrix dynamic_matrix;
  ClusterAssignmentMatrix static_matrix;
  int fallbacks = 0;
  double max_recovery_error = 0.0;
};

/// Read-only state shared by every run of an experiment.
struct ExperimentSetup {
  ExperimentConfig cfg;
  ClusterAssignmentMatrix static_matrix;
  ClusterAssignmentMatrix dynamic_matrix;
  Placement static_clusters;
  std::vector<ClusterCode<double>> codes;
  // Plain GC as a single cluster over all K batches.
  std::optional<ClusterCode<double>> gc_code;
  std::shared_ptr<const Dataset<double>> data;
  std::vector<MiniBatch> batches;
};

ExperimentSetup make_setup(const ExperimentConfig& cfg);

/// Everything one scheme needs for one iteration.
struct IterationInputs {
  int run = 0;
  int iteration = 0;
  std::vector<bool> realized;
  std::vector<bool> observed;
  Eigen::VectorXd observed_rates;
  Eigen::VectorXd draws;
  // Partial gradients at the current model; empty unless verifying.
  const std::vector<Eigen::VectorXd>* partial_gradients = nullptr;
  const Eigen::VectorXd* centralized = nullptr;
};

/// Gradient recovered by a scheme from the earliest finishers of each cluster
/// of `placement`, scaled so that it estimates (1/K) Σ g_k.
Eigen::VectorXd decode_from_placement(const std::vector<ClusterCode<double>>& codes, const Placement& placement,
                                      const Eigen::VectorXd& draws,
                                      const std::vector<Eigen::VectorXd>& partial_gradients, int workers);

/// Relative gap between a recovered and the centralized gradient. The scale
/// is the larger of |g| and the mean partial-gradient norm, so a vanishing
/// full gradient near the optimum does not inflate round-off.
double recovery_error(const Eigen::VectorXd& recovered, const Eigen::VectorXd& centralized,
                      const std::vector<Eigen::VectorXd>& partial_gradients);

IterationRecord run_iteration(Scheme scheme, const ExperimentSetup& setup, const IterationInputs& in);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<SchemeSummary> summarize(const std::vector<IterationRecord>& records, const std::vector<Scheme>& schemes,
                                     int runs);

/// Straggler trace of one run: rows are iterations 0..T, columns workers.
std::vector<StragglerState> straggler_trace(const ExperimentConfig& cfg, int run);

inline constexpr double kRecoveryTolerance = 1e-9;

}  // namespace gcdc
