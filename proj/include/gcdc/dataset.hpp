#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gcdc {

/// Labeled regression data. Row i of `features` is x_i, `labels(i)` is y_i.
template <typename Scalar = double>
struct Dataset {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix features;
  Vector labels;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

struct MiniBatch {
  int index = 0;
  std::vector<Eigen::Index> members;
};

template <typename Scalar = double>
struct ModelState {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> theta;
  int iteration = 0;
  Scalar eta = Scalar(0.1);
};

struct SyntheticOptions {
  Eigen::Index dim = 100;
  Eigen::Index train_size = 400;
  Eigen::Index test_size = 100;
  double noise_std = 0.1;
  std::uint64_t seed = 0;
};

/// Draws a ground-truth w ~ N(0, I/d), features x ~ N(0, I) and labels
/// y = x.w + N(0, noise_std^2), so labels have unit scale. The test split
/// shares w with the training split.
template <typename Scalar = double>
std::pair<Dataset<Scalar>, Dataset<Scalar>> generate_synthetic(
    const SyntheticOptions& opts,
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* truth = nullptr) {
  if (opts.dim < 1 || opts.train_size < 1 || opts.test_size < 1) {
    throw std::invalid_argument("generate_synthetic: dimension and sizes must be >= 1");
  }
  if (opts.noise_std < 0.0) {
    throw std::invalid_argument("generate_synthetic: noise_std must be >= 0");
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Eigen::Index d = opts.dim;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(d);
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j) w(j) = Scalar(normal(rng) * w_scale);

  auto make = [&](Eigen::Index n) {
    Dataset<Scalar> ds;
    ds.features.resize(n, d);
    ds.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) ds.features(i, j) = Scalar(normal(rng));
    }
    ds.labels = ds.features * w;
    for (Eigen::Index i = 0; i < n; ++i) ds.labels(i) += Scalar(opts.noise_std * normal(rng));
    return ds;
  };
  Dataset<Scalar> train = make(opts.train_size);
  Dataset<Scalar> test = make(opts.test_size);
  if (truth != nullptr) *truth = w;
  return {std::move(train), std::move(test)};
}

/// Splits indices 0..s-1 into K contiguous batches of s/K points.
inline std::vector<MiniBatch> partition(Eigen::Index size, int num_batches) {
  if (num_batches < 1) throw std::invalid_argument("partition: K must be >= 1");
  if (size % num_batches != 0) {
    throw std::invalid_argument("partition: dataset size not divisible by K");
  }
  const Eigen::Index per = size / num_batches;
  std::vector<MiniBatch> batches(static_cast<std::size_t>(num_batches));
  for (int k = 0; k < num_batches; ++k) {
    auto& b = batches[static_cast<std::size_t>(k)];
    b.index = k;
    b.members.resize(static_cast<std::size_t>(per));
    std::iota(b.members.begin(), b.members.end(), Eigen::Index(k) * per);
  }
  return batches;
}

template <typename Scalar>
std::vector<MiniBatch> partition(const Dataset<Scalar>& data, int num_batches) {
  return partition(data.size(), num_batches);
}

/// Mean squared-error loss (y - x.theta)^2 over the whole dataset.
template <typename Scalar>
Scalar loss(const Dataset<Scalar>& data, const ModelState<Scalar>& model) {
  const auto residual = (data.labels - data.features * model.theta).eval();
  return residual.squaredNorm() / Scalar(data.size());
}

/// Average of grad (y - x.theta)^2 = -2 (y - x.theta) x over the batch.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> partial_gradient(const Dataset<Scalar>& data,
                                                          const MiniBatch& batch,
                                                          const ModelState<Scalar>& model) {
  if (batch.members.empty()) throw std::invalid_argument("partial_gradient: empty batch");
  if (model.theta.size() != data.dim()) {
    throw std::invalid_argument("partial_gradient: dimension mismatch");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grad =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(data.dim());
  for (const Eigen::Index i : batch.members) {
    const Scalar residual = data.labels(i) - data.features.row(i).dot(model.theta);
    grad.noalias() -= Scalar(2) * residual * data.features.row(i).transpose();
  }
  return grad / Scalar(batch.members.size());
}

template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> partial_gradients(
    const Dataset<Scalar>& data, const std::vector<MiniBatch>& batches,
    const ModelState<Scalar>& model) {
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> out;
  out.reserve(batches.size());
  for (const auto& b : batches) out.push_back(partial_gradient(data, b, model));
  return out;
}

/// g = (1/K) sum_k g_k. `expected_batches` guards against a missing batch.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> full_gradient(
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& batch_gradients,
    std::size_t expected_batches) {
  if (batch_gradients.size() != expected_batches || batch_gradients.empty()) {
    throw std::invalid_argument("full_gradient: missing batch gradient");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sum = batch_gradients.front();
  for (std::size_t k = 1; k < batch_gradients.size(); ++k) sum += batch_gradients[k];
  return sum / Scalar(batch_gradients.size());
}

/// Gradient of the mean loss over every point, without batching.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> centralized_gradient(const Dataset<Scalar>& data,
                                                              const ModelState<Scalar>& model) {
  const auto residual = (data.labels - data.features * model.theta).eval();
  return Scalar(-2) * data.features.transpose() * residual / Scalar(data.size());
}

template <typename Scalar>
ModelState<Scalar> gd_step(const ModelState<Scalar>& model,
                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& gradient) {
  if (gradient.size() != model.theta.size()) {
    throw std::invalid_argument("gd_step: dimension mismatch");
  }
  ModelState<Scalar> next = model;
  next.theta -= model.eta * gradient;
  next.iteration = model.iteration + 1;
  return next;
}

}  // namespace gcdc
