#include "gcdc/scheduler.hpp"

#include <algorithm>
#include <numeric>

namespace gcdc {

namespace {

/// Worker preference inside each column.
std::vector<std::vector<int>> column_preferences(const ClusterAssignmentMatrix& matrix,
                                                 const Eigen::VectorXd& rates, PlacementMode mode) {
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(matrix.clusters));
  for (int p = 0; p < matrix.clusters; ++p) {
    auto col = matrix.column(p);
    if (mode == PlacementMode::Heterogeneous) {
      std::stable_sort(col.begin(), col.end(), [&](int a, int b) {
        if (rates(a) != rates(b)) return rates(a) > rates(b);
        return a < b;
      });
    } else {
      std::sort(col.begin(), col.end());
    }
    cols[static_cast<std::size_t>(p)] = std::move(col);
  }
  return cols;
}

struct PlacementState {
  Placement placement;
  std::vector<int> cluster_of;
  int ell = 0;

  bool full(int p) const { return static_cast<int>(placement.members[static_cast<std::size_t>(p)].size()) >= ell; }
  void put(int worker, int p) {
    placement.members[static_cast<std::size_t>(p)].push_back(worker);
    cluster_of[static_cast<std::size_t>(worker)] = p;
  }
};

void place_group(PlacementState& st, const std::vector<std::vector<int>>& prefs,
                 const std::vector<bool>& in_group, const PlacementOrder& order, int max_turns) {
  const int clusters = static_cast<int>(order.clusters.size());
  int remaining = 0;
  for (std::size_t k = 0; k < in_group.size(); ++k) {
    if (in_group[k] && st.cluster_of[k] < 0) ++remaining;
  }
  for (int turn = 0; remaining > 0 && turn < max_turns; ++turn) {
    const int p = order.clusters[static_cast<std::size_t>(turn % clusters)];
    if (st.full(p)) continue;
    int chosen = -1;
    for (const int w : prefs[static_cast<std::size_t>(p)]) {
      if (in_group[static_cast<std::size_t>(w)] && st.cluster_of[static_cast<std::size_t>(w)] < 0) {
        chosen = w;
        break;
      }
    }
    if (chosen < 0) break;  // placement conflict observed
    st.put(chosen, p);
    --remaining;
  }
}

}  // namespace

std::vector<int> Placement::cluster_of(int workers) const {
  std::vector<int> out(static_cast<std::size_t>(workers), -1);
  for (std::size_t p = 0; p < members.size(); ++p) {
    for (const int w : members[p]) out[static_cast<std::size_t>(w)] = static_cast<int>(p);
  }
  return out;
}

PlacementOrder determine_order(const ClusterAssignmentMatrix& matrix, const std::vector<bool>& candidates,
                               bool stragglers) {
  std::vector<int> counts(static_cast<std::size_t>(matrix.clusters), 0);
  for (int p = 0; p < matrix.clusters; ++p) {
    for (Eigen::Index i = 0; i < matrix.entries.rows(); ++i) {
      if (candidates[static_cast<std::size_t>(matrix.entries(i, p))]) ++counts[static_cast<std::size_t>(p)];
    }
  }
  PlacementOrder order;
  order.stragglers = stragglers;
  order.clusters.resize(static_cast<std::size_t>(matrix.clusters));
  std::iota(order.clusters.begin(), order.clusters.end(), 0);
  std::stable_sort(order.clusters.begin(), order.clusters.end(), [&](int a, int b) {
    return counts[static_cast<std::size_t>(a)] < counts[static_cast<std::size_t>(b)];
  });
  return order;
}

PhaseOneResult phase1_place(const ClusterAssignmentMatrix& matrix, const std::vector<bool>& stragglers,
                            const Eigen::VectorXd& rates, PlacementMode mode, int max_turns) {
  const int workers = matrix.workers;
  if (static_cast<int>(stragglers.size()) != workers) throw std::invalid_argument("phase1_place: state length != K");
  if (mode == PlacementMode::Heterogeneous && rates.size() != workers) {
    throw std::invalid_argument("phase1_place: rates length != K");
  }

  std::vector<bool> fast(stragglers.size());
  int fast_count = 0;
  for (std::size_t k = 0; k < stragglers.size(); ++k) {
    fast[k] = !stragglers[k];
    fast_count += fast[k] ? 1 : 0;
  }
  const int slow_count = workers - fast_count;

  PhaseOneResult out;
  out.stragglers_first = fast_count < slow_count;
  const std::vector<bool>& first = out.stragglers_first ? stragglers : fast;
  const std::vector<bool>& second = out.stragglers_first ? fast : stragglers;
  out.first_order = determine_order(matrix, first, out.stragglers_first);
  out.second_order = determine_order(matrix, second, !out.stragglers_first);

  const auto prefs = column_preferences(matrix, rates, mode);
  PlacementState st;
  st.ell = matrix.ell();
  st.placement.members.resize(static_cast<std::size_t>(matrix.clusters));
  st.cluster_of.assign(static_cast<std::size_t>(workers), -1);

  place_group(st, prefs, first, out.first_order, max_turns);
  place_group(st, prefs, second, out.second_order, max_turns);

  // Leftovers: direct placement into an open eligible cluster, else conflict.
  auto worker_order = [&](const std::vector<bool>& group) {
    std::vector<int> ws;
    for (int k = 0; k < workers; ++k) {
      if (group[static_cast<std::size_t>(k)] && st.cluster_of[static_cast<std::size_t>(k)] < 0) ws.push_back(k);
    }
    if (mode == PlacementMode::Heterogeneous) {
      std::stable_sort(ws.begin(), ws.end(), [&](int a, int b) { return rates(a) > rates(b); });
    }
    return ws;
  };
  for (const auto* group : {&first, &second}) {
    const auto& order = group == &first ? out.first_order : out.second_order;
    for (const int k : worker_order(*group)) {
      bool placed = false;
      for (const int p : order.clusters) {
        if (!st.full(p) && matrix.eligible(k, p)) {
          st.put(k, p);
          placed = true;
          break;
        }
      }
      if (!placed) out.unplaced.push_back(k);
    }
  }
  std::sort(out.unplaced.begin(), out.unplaced.end());
  out.placement = std::move(st.placement);
  return out;
}

Placement phase2_resolve(const ClusterAssignmentMatrix& matrix, Placement placement,
                         std::vector<int> conflicted) {
  const int ell = matrix.ell();
  std::sort(conflicted.begin(), conflicted.end());
  std::vector<bool> moved(static_cast<std::size_t>(matrix.workers), false);
  auto open_cluster = [&]() {
    for (int p = 0; p < placement.clusters(); ++p) {
      if (static_cast<int>(placement.members[static_cast<std::size_t>(p)].size()) < ell) return p;
    }
    return -1;
  };

  for (const int k : conflicted) {
    const int p = open_cluster();
    if (p < 0) throw NoResolution("phase2_resolve: no open cluster for conflicted worker");
    auto& target = placement.members[static_cast<std::size_t>(p)];
    if (matrix.eligible(k, p)) {
      target.push_back(k);
      moved[static_cast<std::size_t>(k)] = true;
      continue;
    }
    bool resolved = false;
    for (const int q : matrix.clusters_of(k)) {
      auto& donor = placement.members[static_cast<std::size_t>(q)];
      for (auto& w : donor) {
        if (moved[static_cast<std::size_t>(w)] || !matrix.eligible(w, p)) continue;
        target.push_back(w);
        moved[static_cast<std::size_t>(w)] = true;
        w = k;  // k takes the donor's slot
        moved[static_cast<std::size_t>(k)] = true;
        ++placement.swaps;
        resolved = true;
        break;
      }
      if (resolved) break;
    }
    if (!resolved) {
      throw NoResolution("phase2_resolve: no swap places worker " + std::to_string(k) + " (cluster " +
                         std::to_string(p) + " open)");
    }
  }
  return placement;
}

Placement assign_clusters(const ClusterAssignmentMatrix& matrix, const std::vector<bool>& stragglers,
                          const Eigen::VectorXd& rates, PlacementMode mode, ScheduleTrace* trace) {
  PhaseOneResult p1 = phase1_place(matrix, stragglers, rates, mode,
                                   default_max_turns(matrix.workers, matrix.clusters));
  Placement result = p1.unplaced.empty() ? p1.placement : phase2_resolve(matrix, p1.placement, p1.unplaced);
  if (trace != nullptr) trace->phase_one = std::move(p1);
  return result;
}

Placement static_placement(const ClusterAssignmentMatrix& matrix) {
  Placement out;
  out.members.resize(static_cast<std::size_t>(matrix.clusters));
  for (int p = 0; p < matrix.clusters; ++p) out.members[static_cast<std::size_t>(p)] = matrix.column(p);
  return out;
}

std::vector<int> cluster_straggler_counts(const Placement& placement, const std::vector<bool>& stragglers) {
  std::vector<int> counts;
  counts.reserve(placement.members.size());
  for (const auto& members : placement.members) {
    counts.push_back(static_cast<int>(std::count_if(members.begin(), members.end(), [&](int w) {
      return stragglers[static_cast<std::size_t>(w)];
    })));
  }
  return counts;
}

}  // namespace gcdc
