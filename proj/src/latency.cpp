#include "gcdc/latency.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace gcdc {

double sample_latency(double rate, double alpha, int load, std::mt19937_64& rng) {
  if (!(rate > 0.0) || !(alpha > 0.0) || load < 1) {
    throw std::invalid_argument("sample_latency: need rate > 0, alpha > 0, r >= 1");
  }
  const double e = std::exponential_distribution<double>(1.0)(rng);
  return load * (alpha + e / rate);
}

double order_statistic(std::span<const double> values, int k) {
  if (k < 1 || k > static_cast<int>(values.size())) {
    throw std::invalid_argument("order_statistic: rank out of range");
  }
  std::vector<double> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return v[static_cast<std::size_t>(k - 1)];
}

double cluster_completion(std::span<const double> times, int ell, int load) {
  if (static_cast<int>(times.size()) != ell) {
    throw std::invalid_argument("cluster_completion: expected exactly ell times");
  }
  if (load < 1 || load > ell) throw std::invalid_argument("cluster_completion: need 1 <= r <= ell");
  return order_statistic(times, ell - load + 1);
}

double iteration_completion(std::span<const double> cluster_times) {
  if (cluster_times.empty()) throw std::invalid_argument("iteration_completion: no clusters");
  return *std::max_element(cluster_times.begin(), cluster_times.end());
}

double gc_completion(std::span<const double> times, int load) {
  return order_statistic(times, static_cast<int>(times.size()) - load + 1);
}

double lower_bound_completion(std::span<const double> times, int clusters, int ell, int load) {
  if (static_cast<int>(times.size()) != clusters * ell) {
    throw std::invalid_argument("lower_bound_completion: expected K = P*ell times");
  }
  return order_statistic(times, clusters * (ell - load + 1));
}

Eigen::VectorXd sample_iteration(const Eigen::VectorXd& rates, double alpha, int load,
                                 std::mt19937_64& rng) {
  Eigen::VectorXd out(rates.size());
  for (Eigen::Index k = 0; k < rates.size(); ++k) out(k) = sample_latency(rates(k), alpha, load, rng);
  return out;
}

}  // namespace gcdc
