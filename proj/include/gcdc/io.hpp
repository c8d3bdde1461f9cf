#pragma once

#include "gcdc/assignment.hpp"
#include "gcdc/code.hpp"
#include "gcdc/engine.hpp"
#include "gcdc/straggler.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace gcdc {

/// Header: run,iteration,scheme,completion_time,max_cluster_stragglers,conflicts
void write_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path);

/// Header: scheme,mean,std,improvement_vs_gcsc (empty when GC-SC is absent).
void write_summary_csv(const std::vector<SchemeSummary>& summary, const std::filesystem::path& path);

/// One row per (run, iteration, cluster) of the clustered schemes, with the
/// placed workers and the number of realized stragglers among them.
void write_placements_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path);

/// iteration,w0,...,w{K-1} with 1 = fast, 0 = straggling; a second block of
/// rate columns follows the states.
void write_trace_csv(const std::vector<StragglerState>& trace, const std::filesystem::path& path);

nlohmann::json codebook_to_json(const std::vector<ClusterCode<double>>& codes);
std::vector<ClusterCode<double>> codebook_from_json(const nlohmann::json& doc);

nlohmann::json assignment_to_json(const ClusterAssignmentMatrix& matrix, const DataAssignment& data);

/// Reads an experiment config. Keys mirror the CLI flag names with dashes
/// replaced by underscores; missing keys keep the defaults in `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& cfg);

std::string format_double(double value);

}  // namespace gcdc
