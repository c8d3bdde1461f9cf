#include "gcdc/straggler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gcdc {

namespace {

constexpr std::uint64_t kTraceTag = 0x7472616365ULL;  // "trace"
constexpr std::uint64_t kInitTag = 0x696e6974ULL;     // "init"

// Rates must stay strictly positive.
double positive_uniform(std::mt19937_64& rng, double lo, double hi) {
  const double low = std::max(lo, std::numeric_limits<double>::min());
  return std::uniform_real_distribution<double>(low, hi)(rng);
}

}  // namespace

std::string to_string(StragglerModel model) {
  switch (model) {
    case StragglerModel::HomogeneousGE: return "ge-homogeneous";
    case StragglerModel::HeterogeneousGE: return "ge-heterogeneous";
    case StragglerModel::TimeVarying: return "time-varying";
  }
  return "unknown";
}

StragglerModel parse_straggler_model(const std::string& name) {
  if (name == "ge-homogeneous") return StragglerModel::HomogeneousGE;
  if (name == "ge-heterogeneous") return StragglerModel::HeterogeneousGE;
  if (name == "time-varying") return StragglerModel::TimeVarying;
  throw std::invalid_argument("unknown straggler model: " + name);
}

std::string to_string(Ssi ssi) { return ssi == Ssi::Perfect ? "perfect" : "imperfect"; }

Ssi parse_ssi(const std::string& name) {
  if (name == "perfect") return Ssi::Perfect;
  if (name == "imperfect") return Ssi::Imperfect;
  throw std::invalid_argument("unknown SSI mode: " + name);
}

void StragglerConfig::validate() const {
  if (!(switch_prob >= 0.0 && switch_prob <= 1.0)) throw std::invalid_argument("switch probability must be in [0,1]");
  if (!(mu_slow > 0.0 && mu_fast > mu_slow)) throw std::invalid_argument("need mu_fast > mu_slow > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(rate_max > 0.0)) throw std::invalid_argument("rate_max must be > 0");
  if (!(slowdown >= 1.0)) throw std::invalid_argument("slowdown must be >= 1");
  if (initial_stragglers < 0) throw std::invalid_argument("initial straggler count must be >= 0");
  if (model == StragglerModel::TimeVarying && tau >= rate_max) {
    throw std::invalid_argument("time-varying model needs tau < rate_max");
  }
}

WorkerStreams::WorkerStreams(std::uint64_t seed, std::uint64_t run, int workers) {
  engines_.reserve(static_cast<std::size_t>(workers));
  for (int k = 0; k < workers; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(kTraceTag), static_cast<std::uint32_t>(run),
                      static_cast<std::uint32_t>(k)};
    engines_.emplace_back(seq);
  }
}

StragglerState init_states(const StragglerConfig& cfg, int workers, std::uint64_t seed) {
  cfg.validate();
  if (workers < 1) throw std::invalid_argument("init_states: K must be >= 1");
  if (cfg.initial_stragglers > workers) {
    throw std::invalid_argument("init_states: more initial stragglers than workers");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kInitTag)};
  std::mt19937_64 rng(seq);

  std::vector<int> order(static_cast<std::size_t>(workers));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  StragglerState s;
  s.fast = Eigen::VectorXi::Ones(workers);
  s.rate.resize(workers);
  for (int i = 0; i < cfg.initial_stragglers; ++i) s.fast(order[static_cast<std::size_t>(i)]) = 0;

  switch (cfg.model) {
    case StragglerModel::HomogeneousGE:
      for (int k = 0; k < workers; ++k) s.rate(k) = s.fast(k) ? cfg.mu_fast : cfg.mu_slow;
      break;
    case StragglerModel::HeterogeneousGE:
      s.fast_rate.resize(workers);
      for (int k = 0; k < workers; ++k) {
        s.fast_rate(k) = positive_uniform(rng, 0.0, cfg.rate_max);
        s.rate(k) = s.fast(k) ? s.fast_rate(k) : s.fast_rate(k) / cfg.slowdown;
      }
      break;
    case StragglerModel::TimeVarying:
      for (int k = 0; k < workers; ++k) {
        s.rate(k) = s.fast(k) ? std::uniform_real_distribution<double>(cfg.tau, cfg.rate_max)(rng)
                              : positive_uniform(rng, 0.0, cfg.tau);
      }
      break;
  }
  return s;
}

StragglerState step(const StragglerState& state, const StragglerConfig& cfg, WorkerStreams& streams) {
  if (streams.size() != state.size()) throw std::invalid_argument("step: stream count mismatch");
  StragglerState next = state;
  next.iteration = state.iteration + 1;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < state.size(); ++k) {
    auto& rng = streams[k];
    const bool event = unit(rng) < cfg.switch_prob;
    switch (cfg.model) {
      case StragglerModel::HomogeneousGE:
        if (event) next.fast(k) = 1 - state.fast(k);
        next.rate(k) = next.fast(k) ? cfg.mu_fast : cfg.mu_slow;
        break;
      case StragglerModel::HeterogeneousGE:
        if (event) next.fast(k) = 1 - state.fast(k);
        next.rate(k) = next.fast(k) ? state.fast_rate(k) : state.fast_rate(k) / cfg.slowdown;
        break;
      case StragglerModel::TimeVarying: {
        const double fresh = positive_uniform(rng, 0.0, cfg.rate_max);
        if (event) next.rate(k) = fresh;
        next.fast(k) = classify(next.rate(k), cfg.tau) ? 0 : 1;
        break;
      }
    }
  }
  return next;
}

std::vector<bool> straggler_flags(const StragglerState& state, const StragglerConfig& cfg) {
  std::vector<bool> out(static_cast<std::size_t>(state.size()));
  for (int k = 0; k < state.size(); ++k) {
    out[static_cast<std::size_t>(k)] = cfg.model == StragglerModel::HomogeneousGE
                                           ? state.fast(k) == 0
                                           : classify(state.rate(k), cfg.tau);
  }
  return out;
}

}  // namespace gcdc
