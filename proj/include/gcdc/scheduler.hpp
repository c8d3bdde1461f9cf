#pragma once

#include "gcdc/assignment.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace gcdc {

class NoResolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlacementMode { Homogeneous, Heterogeneous };

/// members[p][i] is the worker computing codeword slot i of cluster p.
struct Placement {
  std::vector<std::vector<int>> members;
  int swaps = 0;

  int clusters() const { return static_cast<int>(members.size()); }
  /// Cluster of each worker, -1 if unplaced.
  std::vector<int> cluster_of(int workers) const;
};

/// Clusters in the order they take turns selecting workers.
struct PlacementOrder {
  std::vector<int> clusters;
  bool stragglers = false;
};

struct PhaseOneResult {
  Placement placement;
  std::vector<int> unplaced;
  PlacementOrder first_order;
  PlacementOrder second_order;
  bool stragglers_first = false;
};

/// Clusters with fewer eligible candidates select first; ties go to the lower
/// index. `candidates` flags the workers that count toward availability.
PlacementOrder determine_order(const ClusterAssignmentMatrix& matrix, const std::vector<bool>& candidates,
                               bool stragglers);

/// Greedy placement of the larger worker group, then the other. Inside a group
/// clusters take turns in their order and each open cluster takes the first
/// eligible unplaced worker of the group (lowest index, or highest rate in
/// heterogeneous mode). A group stops at the first turn where an open cluster
/// has no such worker, or after `max_turns`. Leftovers are then put in any open
/// eligible cluster; whoever still has none is returned in `unplaced`.
PhaseOneResult phase1_place(const ClusterAssignmentMatrix& matrix, const std::vector<bool>& stragglers,
                            const Eigen::VectorXd& rates, PlacementMode mode, int max_turns);

/// Swaps each conflicted worker k into a full cluster p̄ ∈ P_k in exchange for
/// a member of p̄ that may join the open cluster. Conflicts are handled in
/// ascending worker order; the first swap found (clusters ascending, members in
/// slot order) is taken and a worker already moved by a swap is never moved again.
Placement phase2_resolve(const ClusterAssignmentMatrix& matrix, Placement placement,
                         std::vector<int> conflicted);

struct ScheduleTrace {
  PhaseOneResult phase_one;
};

/// Full dynamic clustering for one iteration. Throws NoResolution when a
/// conflict has no swap.
Placement assign_clusters(const ClusterAssignmentMatrix& matrix, const std::vector<bool>& stragglers,
                          const Eigen::VectorXd& rates, PlacementMode mode,
                          ScheduleTrace* trace = nullptr);

/// Static clustering: column p of an ℓ×P matrix, row i computing slot i.
Placement static_placement(const ClusterAssignmentMatrix& matrix);

std::vector<int> cluster_straggler_counts(const Placement& placement, const std::vector<bool>& stragglers);

inline int default_max_turns(int workers, int clusters) { return 2 * workers * clusters; }

}  // namespace gcdc
