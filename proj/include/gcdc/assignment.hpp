#pragma once

#include "gcdc/code.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace gcdc {

/// Worker-to-cluster eligibility. Column p lists the (0-based) workers that
/// may serve cluster p; ℓ rows for a static assignment, nℓ for a dynamic one.
struct ClusterAssignmentMatrix {
  Eigen::MatrixXi entries;
  int workers = 0;
  int clusters = 0;
  int replication = 1;
  bool dynamic = false;

  int ell() const { return workers / clusters; }
  std::vector<int> column(int cluster) const;
  bool eligible(int worker, int cluster) const;
  /// Clusters the worker may join, ascending.
  std::vector<int> clusters_of(int worker) const;
  /// Copy with every column sorted ascending by worker index.
  ClusterAssignmentMatrix normalized() const;
};

/// Builds the matrix from per-group circular shifts. Workers are split into ℓ
/// groups of P consecutive indices; a shift s puts group element (p − s) mod P
/// in column p. Row j·ℓ + g holds group g under its j-th shift, so shifts
/// {{0,1},{3,2},{0,3}} with K=12, P=4 give the 6×4 example layout. Columns are
/// left unsorted.
ClusterAssignmentMatrix assignment_from_shifts(int workers, int clusters,
                                               const std::vector<std::vector<int>>& shifts,
                                               bool dynamic);

/// Fixed ℓ×P partition: even groups unshifted, odd groups shifted by P−1.
ClusterAssignmentMatrix static_assignment(int workers, int clusters);

/// Samples n distinct shifts per group without replacement and returns the
/// column-sorted ℓn×P matrix.
ClusterAssignmentMatrix dynamic_assignment_matrix(int workers, int clusters, int replication,
                                                  std::uint64_t seed);

/// Mini-batches cluster p encodes: pℓ, ..., pℓ+ℓ−1.
std::vector<int> cluster_batches(int cluster, int ell);

std::vector<ClusterCode<double>> build_codebook(int workers, int clusters, int load);

struct DataAssignment {
  std::vector<std::vector<int>> batches;
  int memory = 0;
};

/// Minimal-memory data placement: each worker stores exactly the batches its
/// assignable codewords touch. A static worker holds its own codeword only.
DataAssignment derive_data_assignment(const ClusterAssignmentMatrix& matrix,
                                      const std::vector<ClusterCode<double>>& codes);

/// Conflict-resolution guarantee n > P(K−1)/(2K).
bool feasibility_check(int workers, int clusters, int replication);

}  // namespace gcdc
