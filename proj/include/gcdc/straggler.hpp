#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gcdc {

enum class StragglerModel { HomogeneousGE, HeterogeneousGE, TimeVarying };
enum class Ssi { Perfect, Imperfect };

std::string to_string(StragglerModel model);
StragglerModel parse_straggler_model(const std::string& name);
std::string to_string(Ssi ssi);
Ssi parse_ssi(const std::string& name);

struct StragglerConfig {
  StragglerModel model = StragglerModel::HomogeneousGE;
  double switch_prob = 0.05;
  double mu_slow = 0.1;
  double mu_fast = 10.0;
  // Heterogeneous models draw rates from U[0, rate_max].
  double rate_max = 5.0;
  double slowdown = 10.0;
  double tau = 0.5;
  double alpha = 0.01;
  Ssi ssi = Ssi::Imperfect;
  int initial_stragglers = 0;

  void validate() const;
};

/// Snapshot of every worker at one iteration. fast(k) = 1 unless worker k is
/// in the slow state; fast_rate is only populated by the heterogeneous GE model.
struct StragglerState {
  Eigen::VectorXi fast;
  Eigen::VectorXd rate;
  Eigen::VectorXd fast_rate;
  int iteration = 0;

  int size() const { return static_cast<int>(fast.size()); }
};

/// One independent generator per worker, so worker k's trace does not depend
/// on how many draws any other worker consumed.
class WorkerStreams {
 public:
  WorkerStreams(std::uint64_t seed, std::uint64_t run, int workers);
  std::mt19937_64& operator[](int worker) { return engines_[static_cast<std::size_t>(worker)]; }
  int size() const { return static_cast<int>(engines_.size()); }

 private:
  std::vector<std::mt19937_64> engines_;
};

StragglerState init_states(const StragglerConfig& cfg, int workers, std::uint64_t seed);

StragglerState step(const StragglerState& state, const StragglerConfig& cfg, WorkerStreams& streams);

inline bool classify(double rate, double tau) { return rate < tau; }

/// What the scheduler sees before iteration t: S^t with perfect SSI, S^{t−1}
/// otherwise.
inline const StragglerState& observe(const StragglerState& current, const StragglerState& previous,
                                     Ssi ssi) {
  return ssi == Ssi::Perfect ? current : previous;
}

/// Per-worker straggler flag used for placement and accounting. The
/// homogeneous model uses the chain state, the other models the τ threshold.
std::vector<bool> straggler_flags(const StragglerState& state, const StragglerConfig& cfg);

}  // namespace gcdc
