#include "gcdc/assignment.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace gcdc {
namespace {

Eigen::MatrixXi one_based(const ClusterAssignmentMatrix& a) { return a.entries.array() + 1; }

TEST(StaticAssignment, RunningExample) {
  const auto a = static_assignment(12, 4);
  Eigen::MatrixXi expected(3, 4);
  expected << 1, 2, 3, 4,
              6, 7, 8, 5,
              9, 10, 11, 12;
  EXPECT_EQ(one_based(a), expected);
  EXPECT_FALSE(a.dynamic);
  EXPECT_EQ(a.replication, 1);
}

TEST(StaticAssignment, SingleCluster) {
  const auto a = static_assignment(6, 1);
  ASSERT_EQ(a.entries.cols(), 1);
  std::vector<int> col = a.column(0);
  std::sort(col.begin(), col.end());
  EXPECT_EQ(col, (std::vector<int>{0, 1, 2, 3, 4, 5}));
}

TEST(StaticAssignment, OneWorkerPerCluster) {
  const auto a = static_assignment(5, 5);
  ASSERT_EQ(a.entries.rows(), 1);
  std::set<int> seen(a.entries.data(), a.entries.data() + a.entries.size());
  EXPECT_EQ(seen.size(), 5u);
}

TEST(StaticAssignment, EveryWorkerOnce) {
  for (const auto& [k, p] : std::vector<std::pair<int, int>>{{12, 4}, {20, 5}, {30, 3}, {8, 2}}) {
    const auto a = static_assignment(k, p);
    std::vector<int> all(a.entries.data(), a.entries.data() + a.entries.size());
    std::sort(all.begin(), all.end());
    for (int w = 0; w < k; ++w) EXPECT_EQ(all[static_cast<std::size_t>(w)], w);
  }
}

TEST(StaticAssignment, RejectsNonDivisible) {
  EXPECT_THROW(static_assignment(10, 4), std::invalid_argument);
  EXPECT_THROW(dynamic_assignment_matrix(10, 4, 2, 1), std::invalid_argument);
}

TEST(AssignmentFromShifts, DynamicRunningExample) {
  const auto a = oracle::example_dynamic_matrix();
  Eigen::MatrixXi expected(6, 4);
  expected << 1, 2, 3, 4,
              6, 7, 8, 5,
              9, 10, 11, 12,
              4, 1, 2, 3,
              7, 8, 5, 6,
              10, 11, 12, 9;
  EXPECT_EQ(one_based(a), expected);
  EXPECT_EQ(a.clusters_of(0), (std::vector<int>{0, 1}));
  EXPECT_EQ(a.clusters_of(1), (std::vector<int>{1, 2}));

  Eigen::MatrixXi sorted(6, 4);
  sorted << 1, 1, 2, 3,
            4, 2, 3, 4,
            6, 7, 5, 5,
            7, 8, 8, 6,
            9, 10, 11, 9,
            10, 11, 12, 12;
  EXPECT_EQ(one_based(a.normalized()), sorted);
}

TEST(AssignmentFromShifts, RejectsRepeatedShift) {
  EXPECT_THROW(assignment_from_shifts(12, 4, {{0, 0}, {1, 2}, {0, 3}}, true), std::invalid_argument);
  EXPECT_THROW(assignment_from_shifts(12, 4, {{0, 4}, {1, 2}, {0, 3}}, true), std::invalid_argument);
}

void expect_dynamic_invariants(const ClusterAssignmentMatrix& a) {
  const int ell = a.ell();
  ASSERT_EQ(a.entries.rows(), ell * a.replication);
  for (int w = 0; w < a.workers; ++w) {
    EXPECT_EQ(static_cast<int>(a.clusters_of(w).size()), a.replication) << "worker " << w;
  }
  for (int p = 0; p < a.clusters; ++p) {
    const auto col = a.column(p);
    EXPECT_TRUE(std::is_sorted(col.begin(), col.end()));
    EXPECT_EQ(std::set<int>(col.begin(), col.end()).size(), col.size());
    std::vector<int> per_group(static_cast<std::size_t>(ell), 0);
    for (const int w : col) ++per_group[static_cast<std::size_t>(w / a.clusters)];
    for (const int c : per_group) EXPECT_EQ(c, a.replication);
  }
}

TEST(DynamicAssignment, Invariants) {
  for (const auto& [k, p, n] : std::vector<std::tuple<int, int, int>>{
           {12, 4, 1}, {12, 4, 2}, {12, 4, 4}, {20, 5, 3}, {30, 6, 4}, {9, 3, 2}}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto a = dynamic_assignment_matrix(k, p, n, seed);
      EXPECT_TRUE(a.dynamic);
      expect_dynamic_invariants(a);
    }
  }
}

TEST(DynamicAssignment, FullReplicationMakesEveryoneEligible) {
  const auto a = dynamic_assignment_matrix(12, 4, 4, 7);
  for (int w = 0; w < 12; ++w) EXPECT_EQ(a.clusters_of(w), (std::vector<int>{0, 1, 2, 3}));
}

TEST(DynamicAssignment, RejectsReplicationAboveClusters) {
  EXPECT_THROW(dynamic_assignment_matrix(12, 4, 5, 1), std::invalid_argument);
  EXPECT_THROW(dynamic_assignment_matrix(12, 4, 0, 1), std::invalid_argument);
}

TEST(DynamicAssignment, DeterministicPerSeed) {
  EXPECT_EQ(dynamic_assignment_matrix(20, 5, 3, 42).entries, dynamic_assignment_matrix(20, 5, 3, 42).entries);
  bool any_differs = false;
  for (std::uint64_t s = 1; s < 10; ++s) {
    any_differs |= dynamic_assignment_matrix(20, 5, 3, 0).entries != dynamic_assignment_matrix(20, 5, 3, s).entries;
  }
  EXPECT_TRUE(any_differs);
}

TEST(DynamicAssignment, ShiftsAreUniform) {
  // Each group's first worker lands in a given cluster with probability n/P.
  const int trials = 4000;
  std::vector<int> hits(4, 0);
  for (int t = 0; t < trials; ++t) {
    const auto a = dynamic_assignment_matrix(12, 4, 2, static_cast<std::uint64_t>(t));
    for (const int p : a.clusters_of(0)) ++hits[static_cast<std::size_t>(p)];
  }
  for (const int h : hits) EXPECT_NEAR(h / double(trials), 0.5, 0.04);
}

TEST(DataAssignment, DynamicRunningExample) {
  const auto codes = build_codebook(12, 4, 2);
  const auto data = derive_data_assignment(oracle::example_dynamic_matrix(), codes);
  EXPECT_EQ(data.batches[0], (std::vector<int>{0, 1, 2, 3, 4, 5}));
  for (const auto& b : data.batches) EXPECT_EQ(b.size(), 6u);
  EXPECT_EQ(data.memory, 6);
}

TEST(DataAssignment, StaticRunningExample) {
  const auto codes = build_codebook(12, 4, 2);
  const auto data = derive_data_assignment(static_assignment(12, 4), codes);
  // Per-worker batch pairs of the static layout, 0-based.
  const std::vector<std::vector<int>> expected = {{0, 1}, {3, 4}, {6, 7},  {9, 10},  {10, 11}, {1, 2},
                                                  {4, 5}, {7, 8}, {0, 2},  {3, 5},   {6, 8},   {9, 11}};
  EXPECT_EQ(data.batches, expected);
  EXPECT_EQ(data.memory, 2);
}

TEST(DataAssignment, SingleReplicationHoldsOneCluster) {
  const auto codes = build_codebook(20, 5, 3);
  const auto a = dynamic_assignment_matrix(20, 5, 1, 3);
  const auto data = derive_data_assignment(a, codes);
  for (int w = 0; w < 20; ++w) {
    const int p = a.clusters_of(w).front();
    EXPECT_EQ(data.batches[static_cast<std::size_t>(w)], cluster_batches(p, 4));
  }
  EXPECT_EQ(data.memory, 4);
}

TEST(DataAssignment, MemoryIsReplicationTimesClusterSize) {
  const auto codes = build_codebook(20, 5, 3);
  for (int n = 1; n <= 5; ++n) {
    const auto data = derive_data_assignment(dynamic_assignment_matrix(20, 5, n, 9), codes);
    EXPECT_EQ(data.memory, 4 * n);
    for (const auto& b : data.batches) EXPECT_EQ(static_cast<int>(b.size()), 4 * n);
  }
}

TEST(DataAssignment, RejectsMissingCodes) {
  auto codes = build_codebook(12, 4, 2);
  codes.pop_back();
  EXPECT_THROW(derive_data_assignment(static_assignment(12, 4), codes), std::invalid_argument);
}

TEST(Feasibility, Cases) {
  EXPECT_TRUE(feasibility_check(12, 4, 2));
  EXPECT_TRUE(feasibility_check(20, 5, 3));
  EXPECT_FALSE(feasibility_check(20, 5, 2));
  for (int p = 3; p <= 8; ++p) {
    for (int k = p; k <= 64; k += p) EXPECT_FALSE(feasibility_check(k, p, 1)) << k << " " << p;
  }
}

TEST(Feasibility, MatchesRealArithmetic) {
  for (int p = 1; p <= 10; ++p) {
    for (int k = p; k <= 100; k += p) {
      for (int n = 1; n <= p; ++n) {
        const double bound = static_cast<double>(p) * (k - 1) / (2.0 * k);
        // Skip exact ties, where the floating-point comparison is fragile.
        if (std::abs(n - bound) < 1e-12) {
          EXPECT_FALSE(feasibility_check(k, p, n));
          continue;
        }
        EXPECT_EQ(feasibility_check(k, p, n), n > bound) << k << " " << p << " " << n;
      }
    }
  }
}

}  // namespace
}  // namespace gcdc
