#pragma once

#include <Eigen/Core>

#include <random>
#include <span>

namespace gcdc {

/// Inverse-CDF draw from P[X <= t] = 1 − exp(−μ(t/r − α)), t >= rα.
double sample_latency(double rate, double alpha, int load, std::mt19937_64& rng);

/// k-th smallest (1-based) of the values.
double order_statistic(std::span<const double> values, int k);

/// Time at which the (ℓ−r+1)-th result of the cluster arrives.
double cluster_completion(std::span<const double> times, int ell, int load);

double iteration_completion(std::span<const double> cluster_times);

/// Plain GC: the PS stops at the (K−r+1)-th result.
double gc_completion(std::span<const double> times, int load);

/// Earliest P(ℓ−r+1) finishers regardless of which cluster they belong to.
double lower_bound_completion(std::span<const double> times, int clusters, int ell, int load);

/// One draw per worker, in worker order.
Eigen::VectorXd sample_iteration(const Eigen::VectorXd& rates, double alpha, int load,
                                 std::mt19937_64& rng);

}  // namespace gcdc
