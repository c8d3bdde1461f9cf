#include "gcdc/code.hpp"

#include <gtest/gtest.h>

#include <random>

namespace gcdc {
namespace {

using Vec = Eigen::VectorXd;

std::vector<Vec> random_gradients(int count, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vec> out(static_cast<std::size_t>(count), Vec(dim));
  for (auto& g : out) {
    for (auto& v : g) v = normal(rng);
  }
  return out;
}

// (1/ℓ) Σ g_k over the cluster's batches, summed directly.
Vec direct_average(const ClusterCode<double>& code, const std::vector<Vec>& g) {
  Vec sum = Vec::Zero(g.front().size());
  for (const int b : code.batch_set) sum += g[static_cast<std::size_t>(b)];
  return sum / code.ell();
}

std::vector<ReceivedCodeword<double>> receive(const ClusterCode<double>& code, const std::vector<int>& slots,
                                              const std::vector<Vec>& g) {
  std::vector<ReceivedCodeword<double>> out;
  for (const int s : slots) out.push_back({s, evaluate_codeword(code.codewords[static_cast<std::size_t>(s)], g)});
  return out;
}

std::vector<std::vector<int>> all_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
    std::vector<int> s;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1) s.push_back(i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

TEST(BuildClusterCode, CyclicSupportsOfRunningExample) {
  const auto code = build_cluster_code<double>(0, {0, 1, 2}, 2);
  EXPECT_EQ(code.codewords[0].support, (std::vector<int>{0, 1}));
  EXPECT_EQ(code.codewords[1].support, (std::vector<int>{1, 2}));
  EXPECT_EQ(code.codewords[2].support, (std::vector<int>{2, 0}));
  for (const auto& cw : code.codewords) {
    EXPECT_EQ(cw.cluster, 0);
    EXPECT_EQ(cw.coefficients.size(), 2);
  }
}

TEST(BuildClusterCode, LoadOneNeedsEveryCodeword) {
  const auto code = build_cluster_code<double>(1, {3, 4, 5}, 1);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(code.codewords[static_cast<std::size_t>(i)].support, (std::vector<int>{3 + i}));
  const auto g = random_gradients(6, 4, 1);
  EXPECT_THROW(decode_cluster(code, receive(code, {0, 2}, g)), NotDecodable);
  EXPECT_TRUE(decode_cluster(code, receive(code, {0, 1, 2}, g)).isApprox(direct_average(code, g), 1e-12));
}

TEST(BuildClusterCode, FullLoadAnySingleCodewordDecodes) {
  const auto code = build_cluster_code<double>(0, {0, 1, 2}, 3);
  const auto g = random_gradients(3, 5, 2);
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(code.codewords[static_cast<std::size_t>(s)].support.size(), 3u);
    const Vec got = decode_cluster(code, receive(code, {s}, g));
    EXPECT_LE((got - direct_average(code, g)).norm(), 1e-9 * direct_average(code, g).norm());
  }
}

TEST(BuildClusterCode, RejectsLoadAboveClusterSize) {
  EXPECT_THROW(build_cluster_code<double>(0, {0, 1}, 3), std::invalid_argument);
  EXPECT_THROW(build_cluster_code<double>(0, {0, 1}, 0), std::invalid_argument);
}

TEST(BuildClusterCode, DeterministicForClusterShape) {
  const auto a = build_cluster_code<double>(2, {6, 7, 8, 9}, 3);
  const auto b = build_cluster_code<double>(2, {6, 7, 8, 9}, 3);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.codewords[i].coefficients, b.codewords[i].coefficients);
}

TEST(DecodeCluster, RunningExampleTwoOfThree) {
  const auto code = build_cluster_code<double>(0, {0, 1, 2}, 2);
  const auto g = random_gradients(3, 10, 3);
  const Vec oracle = direct_average(code, g);
  const Vec got = decode_cluster(code, receive(code, {0, 1}, g));
  EXPECT_LE((got - oracle).norm(), 1e-9 * oracle.norm());
  const Vec all = decode_cluster(code, receive(code, {0, 1, 2}, g));
  EXPECT_LE((all - got).norm(), 1e-9 * oracle.norm());
}

TEST(DecodeCluster, BelowThresholdIsNotDecodable) {
  const auto code = build_cluster_code<double>(0, {0, 1, 2, 3, 4}, 2);
  const auto g = random_gradients(5, 3, 4);
  EXPECT_THROW(decode_cluster(code, receive(code, {0, 2, 4}, g)), NotDecodable);
  // Repeating a slot does not count twice.
  EXPECT_THROW(decode_cluster(code, receive(code, {0, 2, 4, 4}, g)), NotDecodable);
  EXPECT_NO_THROW(decode_cluster(code, receive(code, {0, 2, 4, 1}, g)));
}

TEST(DecodeCluster, EveryThresholdSubsetUpToSix) {
  for (int ell = 1; ell <= 6; ++ell) {
    for (int r = 1; r <= ell; ++r) {
      std::vector<int> batches(static_cast<std::size_t>(ell));
      for (int i = 0; i < ell; ++i) batches[static_cast<std::size_t>(i)] = 10 + i;
      const auto code = build_cluster_code<double>(ell, batches, r);
      const auto g = random_gradients(10 + ell, 7, static_cast<std::uint64_t>(ell * 10 + r));
      const Vec oracle = direct_average(code, g);
      for (const auto& subset : all_subsets(ell, ell - r + 1)) {
        const Vec got = decode_cluster(code, receive(code, subset, g));
        EXPECT_LE((got - oracle).norm(), 1e-9 * oracle.norm()) << "ell " << ell << " r " << r;
      }
      if (ell - r >= 1) {
        for (const auto& subset : all_subsets(ell, ell - r)) {
          EXPECT_THROW(decode_cluster(code, receive(code, subset, g)), NotDecodable);
        }
      }
    }
  }
}

TEST(ClusterCode, CyclicBalance) {
  for (int ell = 1; ell <= 8; ++ell) {
    for (int r = 1; r <= ell; ++r) {
      std::vector<int> batches(static_cast<std::size_t>(ell));
      for (int i = 0; i < ell; ++i) batches[static_cast<std::size_t>(i)] = i;
      const auto code = build_cluster_code<double>(0, batches, r);
      std::vector<int> cover(static_cast<std::size_t>(ell), 0);
      for (const auto& cw : code.codewords) {
        ASSERT_EQ(static_cast<int>(cw.support.size()), r);
        for (const int b : cw.support) ++cover[static_cast<std::size_t>(b)];
      }
      for (const int c : cover) EXPECT_EQ(c, r);
    }
  }
}

TEST(ClusterCode, LargeClusterUsesSampledCheck) {
  // C(24, 13) exceeds the exhaustive limit, so subsets are sampled.
  std::vector<int> batches(24);
  for (int i = 0; i < 24; ++i) batches[static_cast<std::size_t>(i)] = i;
  const auto code = build_cluster_code<double>(0, batches, 12);
  EXPECT_TRUE(verify_decodability(code));
}

TEST(EvaluateCodeword, Cases) {
  Codeword<double> cw;
  cw.support = {0, 1};
  cw.coefficients = Vec::Zero(2);
  std::vector<Vec> g = {Vec::Unit(2, 0), Vec::Unit(2, 1)};
  EXPECT_EQ(evaluate_codeword(cw, g), Vec::Zero(2));

  cw.coefficients << 2.0, -1.0;
  Vec expected(2);
  expected << 2.0, -1.0;
  EXPECT_EQ(evaluate_codeword(cw, g), expected);

  Codeword<double> single;
  single.support = {1};
  single.coefficients = Vec::Ones(1);
  EXPECT_EQ(evaluate_codeword(single, g), g[1]);

  cw.support = {0, 5};
  EXPECT_THROW(evaluate_codeword(cw, g), std::invalid_argument);
  std::map<int, Vec> partial{{0, g[0]}};
  EXPECT_THROW(evaluate_codeword(cw, partial), std::invalid_argument);
}

}  // namespace
}  // namespace gcdc
