#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcdc {

class NotDecodable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One coded partial gradient c_{p,i}: a fixed combination of r batch gradients.
template <typename Scalar = double>
struct Codeword {
  int cluster = 0;
  int slot = 0;
  std::vector<int> support;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;
};

/// The ℓ codewords of one cluster, encoded over the cluster's ℓ mini-batches.
template <typename Scalar = double>
struct ClusterCode {
  int cluster = 0;
  int load = 1;
  std::vector<int> batch_set;
  std::vector<Codeword<Scalar>> codewords;

  int ell() const { return static_cast<int>(batch_set.size()); }
  /// Number of distinct codewords the decoder needs.
  int threshold() const { return ell() - load + 1; }

  /// ℓ × ℓ matrix whose row i is codeword i expressed over batch_set positions.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> encoding_matrix() const {
    const int l = ell();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> b =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(l, l);
    for (int i = 0; i < l; ++i) {
      const auto& cw = codewords[static_cast<std::size_t>(i)];
      for (int j = 0; j < load; ++j) b(i, (i + j) % l) = cw.coefficients(j);
    }
    return b;
  }
};

namespace detail {

inline double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// Calls visit(subset) for each k-subset of {0..n-1} in lexicographic order.
/// Stops early and returns false as soon as visit returns false.
template <typename Visit>
bool for_each_subset(int n, int k, Visit&& visit) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!visit(static_cast<const std::vector<int>&>(idx))) return false;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

/// Solves rows^T a = (1/ℓ) 1 in the least-squares sense; returns a and the
/// residual norm.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Scalar> combination_weights(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& rows) {
  const Eigen::Index l = rows.cols();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> target =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(l, Scalar(1) / Scalar(l));
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> system = rows.transpose();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a = system.completeOrthogonalDecomposition().solve(target);
  const Scalar residual = (system * a - target).norm();
  return {std::move(a), residual};
}

// Well-conditioned enough to decode at ~1e-12 relative error.
inline constexpr double kMinSingularRatio = 1e-6;
inline constexpr double kResidualTol = 1e-11;
inline constexpr double kMaxExhaustiveSubsets = 50000;
inline constexpr int kSampledSubsets = 5000;

template <typename Scalar>
bool subset_decodes(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& encoding,
                    const std::vector<int>& subset) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rows(
      static_cast<Eigen::Index>(subset.size()), encoding.cols());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = encoding.row(subset[i]);
  }
  Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(rows);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < Scalar(kMinSingularRatio) * sv(0)) return false;
  return combination_weights(rows).second <= Scalar(kResidualTol);
}

}  // namespace detail

/// True iff every (ℓ−r+1)-subset of codewords can reconstruct the cluster sum.
/// Exhaustive while the subset count stays below 50000, a seeded random
/// sample of 5000 subsets above that.
template <typename Scalar>
bool verify_decodability(const ClusterCode<Scalar>& code) {
  const int l = code.ell();
  const int k = code.threshold();
  const auto encoding = code.encoding_matrix();
  if (detail::binomial(l, k) <= detail::kMaxExhaustiveSubsets) {
    return detail::for_each_subset(
        l, k, [&](const std::vector<int>& s) { return detail::subset_decodes(encoding, s); });
  }
  std::mt19937_64 rng(static_cast<std::uint64_t>(l) * 1000003u + static_cast<std::uint64_t>(k));
  std::vector<int> all(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) all[static_cast<std::size_t>(i)] = i;
  for (int trial = 0; trial < detail::kSampledSubsets; ++trial) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> subset(all.begin(), all.begin() + k);
    std::sort(subset.begin(), subset.end());
    if (!detail::subset_decodes(encoding, subset)) return false;
  }
  return true;
}

/// Cyclic gradient code for one cluster. Codeword i covers batch_set[i],
/// batch_set[i+1], ..., batch_set[i+r-1] (indices mod ℓ). Its coefficients
/// span the null space of a random (r−1)×ℓ matrix H with zero row sums,
/// restricted to that support; every row then lives in null(H), which
/// contains the all-ones vector and, for generic H, is spanned by any ℓ−r+1
/// rows. The construction is seeded by (cluster, ℓ, r) and re-drawn until the
/// subset check passes.
template <typename Scalar = double>
ClusterCode<Scalar> build_cluster_code(int cluster, std::vector<int> batch_set, int load) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const int l = static_cast<int>(batch_set.size());
  if (load < 1) throw std::invalid_argument("build_cluster_code: r must be >= 1");
  if (load > l) throw std::invalid_argument("build_cluster_code: r exceeds cluster size");

  ClusterCode<Scalar> code;
  code.cluster = cluster;
  code.load = load;
  code.batch_set = std::move(batch_set);
  code.codewords.resize(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) {
    auto& cw = code.codewords[static_cast<std::size_t>(i)];
    cw.cluster = cluster;
    cw.slot = i;
    cw.support.resize(static_cast<std::size_t>(load));
    for (int j = 0; j < load; ++j) {
      cw.support[static_cast<std::size_t>(j)] = code.batch_set[static_cast<std::size_t>((i + j) % l)];
    }
  }

  if (load == 1) {
    for (auto& cw : code.codewords) cw.coefficients = Vector::Ones(1);
    return code;
  }

  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(cluster), static_cast<std::uint32_t>(l),
                      static_cast<std::uint32_t>(load), static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    Matrix h(load - 1, l);
    for (int a = 0; a < load - 1; ++a) {
      Scalar row_sum(0);
      for (int b = 0; b + 1 < l; ++b) {
        h(a, b) = Scalar(normal(rng));
        row_sum += h(a, b);
      }
      h(a, l - 1) = -row_sum;
    }

    for (int i = 0; i < l; ++i) {
      Matrix restricted(load - 1, load);
      for (int j = 0; j < load; ++j) restricted.col(j) = h.col((i + j) % l);
      Eigen::JacobiSVD<Matrix> svd(restricted, Eigen::ComputeFullV);
      Vector coeffs = svd.matrixV().col(load - 1);
      if (std::abs(coeffs(0)) > Scalar(1e-8)) coeffs /= coeffs(0);
      code.codewords[static_cast<std::size_t>(i)].coefficients = coeffs;
    }
    if (verify_decodability(code)) return code;
  }
  throw std::runtime_error("build_cluster_code: no decodable code found");
}

/// Σ_j coefficients[j] · gradients[support[j]], gradients indexed by batch id.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> evaluate_codeword(
    const Codeword<Scalar>& cw,
    const std::map<int, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& gradients) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out;
  for (std::size_t j = 0; j < cw.support.size(); ++j) {
    const auto it = gradients.find(cw.support[j]);
    if (it == gradients.end()) {
      throw std::invalid_argument("evaluate_codeword: missing gradient for batch " +
                                  std::to_string(cw.support[j]));
    }
    if (j == 0) {
      out = cw.coefficients(0) * it->second;
    } else {
      out += cw.coefficients(static_cast<Eigen::Index>(j)) * it->second;
    }
  }
  return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> evaluate_codeword(
    const Codeword<Scalar>& cw,
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& gradients) {
  std::map<int, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> view;
  for (const int b : cw.support) {
    if (b < 0 || static_cast<std::size_t>(b) >= gradients.size() ||
        gradients[static_cast<std::size_t>(b)].size() == 0) {
      throw std::invalid_argument("evaluate_codeword: missing gradient for batch " +
                                  std::to_string(b));
    }
    view.emplace(b, gradients[static_cast<std::size_t>(b)]);
  }
  return evaluate_codeword(cw, view);
}

template <typename Scalar>
struct ReceivedCodeword {
  int slot = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> value;
};

/// Recovers (1/ℓ) Σ_{k ∈ batch_set} g_k from at least ℓ−r+1 distinct slots.
/// Repeated slots are ignored after their first occurrence.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> decode_cluster(
    const ClusterCode<Scalar>& code, const std::vector<ReceivedCodeword<Scalar>>& received) {
  const int l = code.ell();
  std::vector<bool> seen(static_cast<std::size_t>(l), false);
  std::vector<const ReceivedCodeword<Scalar>*> distinct;
  for (const auto& rc : received) {
    if (rc.slot < 0 || rc.slot >= l) throw std::invalid_argument("decode_cluster: bad slot");
    if (seen[static_cast<std::size_t>(rc.slot)]) continue;
    seen[static_cast<std::size_t>(rc.slot)] = true;
    distinct.push_back(&rc);
  }
  if (static_cast<int>(distinct.size()) < code.threshold()) {
    throw NotDecodable("decode_cluster: received " + std::to_string(distinct.size()) +
                       " distinct codewords, need " + std::to_string(code.threshold()));
  }

  const auto encoding = code.encoding_matrix();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rows(
      static_cast<Eigen::Index>(distinct.size()), l);
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = encoding.row(distinct[i]->slot);
  }
  const auto [weights, residual] = detail::combination_weights(rows);
  if (!(residual <= Scalar(1e-8))) {
    throw std::logic_error("decode_cluster: singular system, residual " + std::to_string(double(residual)));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = weights(0) * distinct[0]->value;
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    out += weights(static_cast<Eigen::Index>(i)) * distinct[i]->value;
  }
  return out;
}

}  // namespace gcdc
