#include "gcdc/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace gcdc {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("write_csv: no records");
  auto out = open_for_write(path);
  out << "run,iteration,scheme,completion_time,max_cluster_stragglers,conflicts\n";
  for (const auto& r : records) {
    out << r.run << ',' << r.iteration << ',' << to_string(r.scheme) << ',' << format_double(r.completion_time) << ','
        << r.max_cluster_stragglers << ',' << r.conflicts << '\n';
  }
  finish(out, path);
}

void write_summary_csv(const std::vector<SchemeSummary>& summary, const std::filesystem::path& path) {
  if (summary.empty()) throw std::invalid_argument("write_summary_csv: empty summary");
  auto out = open_for_write(path);
  out << "scheme,mean,std,improvement_vs_gcsc\n";
  for (const auto& s : summary) {
    out << to_string(s.scheme) << ',' << format_double(s.mean) << ',' << format_double(s.std) << ',';
    if (s.improvement_vs_gcsc) out << format_double(*s.improvement_vs_gcsc);
    out << '\n';
  }
  finish(out, path);
}

void write_placements_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "run,iteration,scheme,cluster,workers,stragglers\n";
  for (const auto& r : records) {
    for (std::size_t p = 0; p < r.placement.size(); ++p) {
      out << r.run << ',' << r.iteration << ',' << to_string(r.scheme) << ',' << p << ',';
      for (std::size_t i = 0; i < r.placement[p].size(); ++i) out << (i ? " " : "") << r.placement[p][i];
      out << ',' << r.cluster_stragglers[p] << '\n';
    }
  }
  finish(out, path);
}

void write_trace_csv(const std::vector<StragglerState>& trace, const std::filesystem::path& path) {
  if (trace.empty()) throw std::invalid_argument("write_trace_csv: empty trace");
  auto out = open_for_write(path);
  const int k = trace.front().size();
  out << "iteration";
  for (int w = 0; w < k; ++w) out << ",s" << w;
  for (int w = 0; w < k; ++w) out << ",mu" << w;
  out << '\n';
  for (const auto& s : trace) {
    out << s.iteration;
    for (int w = 0; w < k; ++w) out << ',' << s.fast(w);
    for (int w = 0; w < k; ++w) out << ',' << format_double(s.rate(w));
    out << '\n';
  }
  finish(out, path);
}

nlohmann::json codebook_to_json(const std::vector<ClusterCode<double>>& codes) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& code : codes) {
    nlohmann::json cws = nlohmann::json::array();
    for (const auto& cw : code.codewords) {
      std::vector<double> coeffs(cw.coefficients.data(), cw.coefficients.data() + cw.coefficients.size());
      cws.push_back({{"slot", cw.slot}, {"support", cw.support}, {"coefficients", coeffs}});
    }
    clusters.push_back({{"cluster", code.cluster}, {"load", code.load}, {"batches", code.batch_set},
                        {"codewords", std::move(cws)}});
  }
  return {{"clusters", std::move(clusters)}};
}

std::vector<ClusterCode<double>> codebook_from_json(const nlohmann::json& doc) {
  std::vector<ClusterCode<double>> codes;
  for (const auto& c : doc.at("clusters")) {
    ClusterCode<double> code;
    code.cluster = c.at("cluster").get<int>();
    code.load = c.at("load").get<int>();
    code.batch_set = c.at("batches").get<std::vector<int>>();
    for (const auto& w : c.at("codewords")) {
      Codeword<double> cw;
      cw.cluster = code.cluster;
      cw.slot = w.at("slot").get<int>();
      cw.support = w.at("support").get<std::vector<int>>();
      const auto coeffs = w.at("coefficients").get<std::vector<double>>();
      cw.coefficients = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
      code.codewords.push_back(std::move(cw));
    }
    codes.push_back(std::move(code));
  }
  return codes;
}

nlohmann::json assignment_to_json(const ClusterAssignmentMatrix& matrix, const DataAssignment& data) {
  nlohmann::json columns = nlohmann::json::array();
  for (int p = 0; p < matrix.clusters; ++p) columns.push_back(matrix.column(p));
  return {{"workers", matrix.workers},
          {"clusters", matrix.clusters},
          {"replication", matrix.replication},
          {"dynamic", matrix.dynamic},
          {"columns", std::move(columns)},
          {"memory", data.memory},
          {"data_assignment", data.batches}};
}

ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig cfg) {
  if (!doc.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::set<std::string> known = {
      "workers", "clusters", "load", "replication", "iterations", "runs", "seed", "schemes",
      "model", "switch_prob", "mu_slow", "mu_fast", "alpha", "tau", "ssi", "initial_stragglers",
      "verify_gradients", "verify_dim", "verify_size", "threads", "out"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }
  auto take = [&](const char* key, auto& field) {
    if (doc.contains(key)) doc.at(key).get_to(field);
  };
  take("workers", cfg.workers);
  take("clusters", cfg.clusters);
  take("load", cfg.load);
  take("replication", cfg.replication);
  take("iterations", cfg.iterations);
  take("runs", cfg.runs);
  take("seed", cfg.seed);
  take("switch_prob", cfg.straggler.switch_prob);
  take("mu_slow", cfg.straggler.mu_slow);
  take("mu_fast", cfg.straggler.mu_fast);
  take("alpha", cfg.straggler.alpha);
  take("tau", cfg.straggler.tau);
  take("initial_stragglers", cfg.straggler.initial_stragglers);
  take("verify_gradients", cfg.verify_gradients);
  take("verify_dim", cfg.verify_dim);
  take("verify_size", cfg.verify_size);
  take("threads", cfg.threads);
  take("out", cfg.out_dir);
  if (doc.contains("model")) cfg.straggler.model = parse_straggler_model(doc.at("model").get<std::string>());
  if (doc.contains("ssi")) cfg.straggler.ssi = parse_ssi(doc.at("ssi").get<std::string>());
  if (doc.contains("schemes")) {
    const auto& s = doc.at("schemes");
    if (s.is_string()) {
      cfg.schemes = parse_schemes(s.get<std::string>());
    } else {
      cfg.schemes.clear();
      for (const auto& item : s) cfg.schemes.push_back(parse_scheme(item.get<std::string>()));
    }
  }
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  std::vector<std::string> schemes;
  for (const auto s : cfg.schemes) schemes.push_back(to_string(s));
  return {{"workers", cfg.workers},
          {"clusters", cfg.clusters},
          {"load", cfg.load},
          {"replication", cfg.replication},
          {"iterations", cfg.iterations},
          {"runs", cfg.runs},
          {"seed", cfg.seed},
          {"schemes", schemes},
          {"model", to_string(cfg.straggler.model)},
          {"switch_prob", cfg.straggler.switch_prob},
          {"mu_slow", cfg.straggler.mu_slow},
          {"mu_fast", cfg.straggler.mu_fast},
          {"alpha", cfg.straggler.alpha},
          {"tau", cfg.straggler.tau},
          {"ssi", to_string(cfg.straggler.ssi)},
          {"initial_stragglers", cfg.straggler.initial_stragglers},
          {"verify_gradients", cfg.verify_gradients},
          {"verify_dim", cfg.verify_dim},
          {"verify_size", cfg.verify_size},
          {"out", cfg.out_dir}};
}

}  // namespace gcdc
