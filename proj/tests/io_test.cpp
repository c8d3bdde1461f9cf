#include "gcdc/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

namespace gcdc {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gcdc_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::vector<std::string> lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
  }

  fs::path dir_;
};

using CsvTest = TempDir;

TEST_F(CsvTest, DataHeaderAndCardinality) {
  ExperimentConfig cfg;
  cfg.schemes = {Scheme::GCSC, Scheme::GCDC};
  cfg.runs = 2;
  cfg.iterations = 3;
  cfg.threads = 1;
  const auto result = run_experiment(cfg);
  write_csv(result.records, dir_ / "data.csv");
  const auto rows = lines(dir_ / "data.csv");
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], "run,iteration,scheme,completion_time,max_cluster_stragglers,conflicts");
  EXPECT_EQ(rows[1].rfind("0,1,GC-SC,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("0,1,GC-DC,", 0), 0u);
  EXPECT_EQ(rows[12].rfind("1,3,GC-DC,", 0), 0u);
}

TEST_F(CsvTest, RoundTripsDoublesExactly) {
  IterationRecord r;
  r.scheme = Scheme::LB;
  r.completion_time = 0.1 + 0.2;
  r.conflicts = -1;
  write_csv({r}, dir_ / "d.csv");
  const auto rows = lines(dir_ / "d.csv");
  std::stringstream ss(rows[1]);
  std::vector<std::string> fields;
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  ASSERT_EQ(fields.size(), 6u);
  EXPECT_EQ(fields[2], "LB");
  EXPECT_EQ(std::stod(fields[3]), 0.1 + 0.2);
  EXPECT_EQ(fields[5], "-1");
}

TEST_F(CsvTest, EmptyRecordsRejected) {
  EXPECT_THROW(write_csv({}, dir_ / "data.csv"), std::invalid_argument);
}

TEST_F(CsvTest, SummaryFormat) {
  std::vector<SchemeSummary> s(2);
  s[0] = {Scheme::GCSC, 2.0, 0.5, 0.0};
  s[1] = {Scheme::GCDC, 1.5, 0.25, 0.25};
  write_summary_csv(s, dir_ / "summary.csv");
  EXPECT_EQ(lines(dir_ / "summary.csv"),
            (std::vector<std::string>{"scheme,mean,std,improvement_vs_gcsc", "GC-SC,2,0.5,0", "GC-DC,1.5,0.25,0.25"}));
  s = {{Scheme::GC, 3.0, 0.0, std::nullopt}};
  write_summary_csv(s, dir_ / "summary.csv");
  EXPECT_EQ(lines(dir_ / "summary.csv")[1], "GC,3,0,");
}

TEST_F(CsvTest, TraceLayout) {
  ExperimentConfig cfg;
  cfg.iterations = 5;
  cfg.straggler.initial_stragglers = 3;
  write_trace_csv(straggler_trace(cfg, 0), dir_ / "trace.csv");
  const auto rows = lines(dir_ / "trace.csv");
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].rfind("iteration,s0,s1,", 0), 0u);
  EXPECT_NE(rows[0].find(",s11,mu0,"), std::string::npos);
  EXPECT_EQ(rows[1].rfind("0,", 0), 0u);
  EXPECT_EQ(rows[6].rfind("5,", 0), 0u);
}

TEST_F(CsvTest, PlacementsListClusters) {
  ExperimentConfig cfg;
  cfg.schemes = {Scheme::GC, Scheme::GCDC};
  cfg.runs = 1;
  cfg.iterations = 2;
  const auto result = run_experiment(cfg);
  write_placements_csv(result.records, dir_ / "placements.csv");
  const auto rows = lines(dir_ / "placements.csv");
  // GC has no clusters; GC-DC contributes P rows per iteration.
  ASSERT_EQ(rows.size(), 1u + 2u * 4u);
  EXPECT_EQ(rows[0], "run,iteration,scheme,cluster,workers,stragglers");
  EXPECT_EQ(rows[1].rfind("0,1,GC-DC,0,", 0), 0u);
}

TEST(CodebookJson, RoundTripStillDecodes) {
  const auto codes = build_codebook(12, 4, 2);
  const auto doc = nlohmann::json::parse(codebook_to_json(codes).dump());
  const auto back = codebook_from_json(doc);
  ASSERT_EQ(back.size(), codes.size());
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> g;
  for (int k = 0; k < 12; ++k) g.push_back(Eigen::VectorXd::NullaryExpr(5, [&] { return normal(rng); }));
  for (std::size_t p = 0; p < codes.size(); ++p) {
    EXPECT_EQ(back[p].batch_set, codes[p].batch_set);
    for (std::size_t i = 0; i < codes[p].codewords.size(); ++i) {
      EXPECT_EQ(back[p].codewords[i].support, codes[p].codewords[i].support);
      EXPECT_EQ(back[p].codewords[i].coefficients, codes[p].codewords[i].coefficients);
    }
    std::vector<ReceivedCodeword<double>> rx{{0, evaluate_codeword(back[p].codewords[0], g)},
                                             {2, evaluate_codeword(back[p].codewords[2], g)}};
    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(5);
    for (const int b : codes[p].batch_set) oracle += g[static_cast<std::size_t>(b)];
    oracle /= 3.0;
    EXPECT_LE((decode_cluster(back[p], rx) - oracle).norm(), 1e-9 * oracle.norm());
  }
}

TEST(AssignmentJson, Shape) {
  const auto a = static_assignment(12, 4);
  const auto doc = assignment_to_json(a, derive_data_assignment(a, build_codebook(12, 4, 2)));
  EXPECT_EQ(doc.at("columns").size(), 4u);
  EXPECT_EQ(doc.at("columns")[0].get<std::vector<int>>(), (std::vector<int>{0, 5, 8}));
  EXPECT_EQ(doc.at("memory").get<int>(), 2);
  EXPECT_EQ(doc.at("data_assignment").size(), 12u);
}

TEST(ConfigJson, ParsesAndKeepsDefaults) {
  const auto doc = nlohmann::json::parse(R"({
    "workers": 20, "clusters": 5, "load": 3, "replication": 3,
    "model": "time-varying", "tau": 1.0, "ssi": "perfect",
    "schemes": ["GC-SC", "GC-DC"], "out": "somewhere"
  })");
  const auto cfg = config_from_json(doc);
  EXPECT_EQ(cfg.workers, 20);
  EXPECT_EQ(cfg.load, 3);
  EXPECT_EQ(cfg.straggler.model, StragglerModel::TimeVarying);
  EXPECT_EQ(cfg.straggler.tau, 1.0);
  EXPECT_EQ(cfg.straggler.ssi, Ssi::Perfect);
  EXPECT_EQ(cfg.schemes, (std::vector<Scheme>{Scheme::GCSC, Scheme::GCDC}));
  EXPECT_EQ(cfg.out_dir, "somewhere");
  EXPECT_EQ(cfg.iterations, 400);
  EXPECT_EQ(cfg.straggler.alpha, 0.01);
  EXPECT_EQ(config_from_json(nlohmann::json::parse(R"({"schemes": "GC,LB"})")).schemes,
            (std::vector<Scheme>{Scheme::GC, Scheme::LB}));
}

TEST(ConfigJson, RoundTrip) {
  ExperimentConfig cfg;
  cfg.workers = 30;
  cfg.clusters = 6;
  cfg.seed = 99;
  cfg.straggler.model = StragglerModel::HeterogeneousGE;
  cfg.straggler.switch_prob = 0.1;
  const auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(ConfigJson, RejectsBadInput) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"wrokers": 3})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"model": "gilbert"})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"workers": "many"})")), nlohmann::json::exception);
  EXPECT_THROW(config_from_json(nlohmann::json::parse("[1, 2]")), std::invalid_argument);
}

TEST(FormatDouble, ShortestExactText) {
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace gcdc
