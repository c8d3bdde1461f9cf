#include "gcdc/assignment.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace gcdc {

namespace {

void check_shape(int workers, int clusters) {
  if (workers < 1 || clusters < 1) throw std::invalid_argument("K and P must be >= 1");
  if (workers % clusters != 0) throw std::invalid_argument("P must divide K");
}

}  // namespace

std::vector<int> ClusterAssignmentMatrix::column(int cluster) const {
  std::vector<int> out(static_cast<std::size_t>(entries.rows()));
  for (Eigen::Index i = 0; i < entries.rows(); ++i) out[static_cast<std::size_t>(i)] = entries(i, cluster);
  return out;
}

bool ClusterAssignmentMatrix::eligible(int worker, int cluster) const {
  return (entries.col(cluster).array() == worker).any();
}

std::vector<int> ClusterAssignmentMatrix::clusters_of(int worker) const {
  std::vector<int> out;
  for (int p = 0; p < clusters; ++p) {
    if (eligible(worker, p)) out.push_back(p);
  }
  return out;
}

ClusterAssignmentMatrix ClusterAssignmentMatrix::normalized() const {
  ClusterAssignmentMatrix out = *this;
  for (Eigen::Index p = 0; p < out.entries.cols(); ++p) {
    auto col = out.entries.col(p);
    std::sort(col.begin(), col.end());
  }
  return out;
}

ClusterAssignmentMatrix assignment_from_shifts(int workers, int clusters,
                                               const std::vector<std::vector<int>>& shifts,
                                               bool dynamic) {
  check_shape(workers, clusters);
  const int ell = workers / clusters;
  if (static_cast<int>(shifts.size()) != ell) {
    throw std::invalid_argument("assignment_from_shifts: need one shift list per group");
  }
  const int n = static_cast<int>(shifts.front().size());
  if (n < 1 || n > clusters) throw std::invalid_argument("assignment_from_shifts: need 1 <= n <= P");

  ClusterAssignmentMatrix a;
  a.workers = workers;
  a.clusters = clusters;
  a.replication = n;
  a.dynamic = dynamic;
  a.entries.resize(ell * n, clusters);
  for (int g = 0; g < ell; ++g) {
    const auto& s = shifts[static_cast<std::size_t>(g)];
    if (static_cast<int>(s.size()) != n ||
        std::set<int>(s.begin(), s.end()).size() != s.size()) {
      throw std::invalid_argument("assignment_from_shifts: each group needs n distinct shifts");
    }
    for (int j = 0; j < n; ++j) {
      const int shift = s[static_cast<std::size_t>(j)];
      if (shift < 0 || shift >= clusters) throw std::invalid_argument("assignment_from_shifts: shift out of range");
      for (int p = 0; p < clusters; ++p) {
        a.entries(j * ell + g, p) = g * clusters + ((p - shift) % clusters + clusters) % clusters;
      }
    }
  }
  return a;
}

ClusterAssignmentMatrix static_assignment(int workers, int clusters) {
  check_shape(workers, clusters);
  const int ell = workers / clusters;
  std::vector<std::vector<int>> shifts(static_cast<std::size_t>(ell));
  for (int g = 0; g < ell; ++g) shifts[static_cast<std::size_t>(g)] = {g % 2 == 0 ? 0 : clusters - 1};
  return assignment_from_shifts(workers, clusters, shifts, false);
}

ClusterAssignmentMatrix dynamic_assignment_matrix(int workers, int clusters, int replication,
                                                  std::uint64_t seed) {
  check_shape(workers, clusters);
  if (replication < 1 || replication > clusters) {
    throw std::invalid_argument("dynamic_assignment_matrix: need 1 <= n <= P");
  }
  const int ell = workers / clusters;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> shifts(static_cast<std::size_t>(ell));
  std::vector<int> pool(static_cast<std::size_t>(clusters));
  for (auto& s : shifts) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first n entries are a uniform n-sample.
    for (int j = 0; j < replication; ++j) {
      std::uniform_int_distribution<int> pick(j, clusters - 1);
      std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    s.assign(pool.begin(), pool.begin() + replication);
  }
  return assignment_from_shifts(workers, clusters, shifts, true).normalized();
}

std::vector<int> cluster_batches(int cluster, int ell) {
  std::vector<int> out(static_cast<std::size_t>(ell));
  std::iota(out.begin(), out.end(), cluster * ell);
  return out;
}

std::vector<ClusterCode<double>> build_codebook(int workers, int clusters, int load) {
  check_shape(workers, clusters);
  std::vector<ClusterCode<double>> codes;
  codes.reserve(static_cast<std::size_t>(clusters));
  for (int p = 0; p < clusters; ++p) {
    codes.push_back(build_cluster_code<double>(p, cluster_batches(p, workers / clusters), load));
  }
  return codes;
}

DataAssignment derive_data_assignment(const ClusterAssignmentMatrix& matrix,
                                      const std::vector<ClusterCode<double>>& codes) {
  if (static_cast<int>(codes.size()) != matrix.clusters) {
    throw std::invalid_argument("derive_data_assignment: need one code per cluster");
  }
  std::vector<std::set<int>> sets(static_cast<std::size_t>(matrix.workers));
  for (Eigen::Index p = 0; p < matrix.entries.cols(); ++p) {
    const auto& code = codes[static_cast<std::size_t>(p)];
    for (Eigen::Index i = 0; i < matrix.entries.rows(); ++i) {
      auto& s = sets[static_cast<std::size_t>(matrix.entries(i, p))];
      if (matrix.dynamic) {
        for (const auto& cw : code.codewords) s.insert(cw.support.begin(), cw.support.end());
      } else {
        const auto& cw = code.codewords[static_cast<std::size_t>(i)];
        s.insert(cw.support.begin(), cw.support.end());
      }
    }
  }
  DataAssignment out;
  out.batches.reserve(sets.size());
  for (const auto& s : sets) {
    out.batches.emplace_back(s.begin(), s.end());
    out.memory = std::max(out.memory, static_cast<int>(s.size()));
  }
  return out;
}

bool feasibility_check(int workers, int clusters, int replication) {
  // n > P(K−1)/(2K)  <=>  2Kn > P(K−1)
  return 2LL * workers * replication > static_cast<long long>(clusters) * (workers - 1);
}

}  // namespace gcdc
