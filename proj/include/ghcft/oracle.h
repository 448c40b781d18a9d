/// @file oracle.h
/// Independent verification backends: Monte-Carlo first-passage simulation
/// of a CMC and truth-table enumeration of minimal cut sets.
///
/// Neither backend shares code with the analytic paths they check:
/// the simulator applies input rates to transitions on its own and never
/// builds a generator; the enumerator only uses `FlattenedTree::evaluate`.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ghcft/model.h"
#include "ghcft/qualitative.h"
#include "ghcft/validate.h"

namespace ghcft {

/// SplitMix64 (Steele, Lea, Flood 2014). Pinned so that estimates are
/// reproducible across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1]: never returns 0, so -log(u) is finite.
  double uniform_open0() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

struct SimulationOptions {
  std::uint64_t runs = 100'000;
  /// Censoring time in hours; 0 selects 100 / (smallest nonzero effective
  /// rate), capped at 1e12 h.
  double horizon = 0;
  std::uint64_t seed = 1;
  /// Worker threads. The estimate does not depend on this value.
  unsigned workers = 1;
};

struct SimulationEstimate {
  std::uint64_t runs = 0;
  std::uint64_t hits = 0;
  std::uint64_t censored = 0;
  double mean_first_passage = 0;  ///< Hours, over hitting runs.
  double rate_estimate = 0;       ///< 1 / mean_first_passage.
  double std_error = 0;           ///< Of rate_estimate, delta method.
  double horizon = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> diagnostics;

  bool operator==(const SimulationEstimate&) const = default;
};

/// Samples first-passage times from the initial state to `target`.
/// Runs are split into fixed chunks of 4096, each driven by its own
/// generator seeded from (seed, chunk index).
/// @throws DomainError  runs == 0, negative horizon, unknown target.
/// @throws UnresolvedInputError  A DI-referenced IFM has no rate.
SimulationEstimate simulate_first_passage(const CmcElement& cmc,
                                          const IfmRates& ifm_rates,
                                          std::string_view target,
                                          const SimulationOptions& options);

/// Minimal cut sets by enumerating all 2^n assignments of the
/// (possibly occurring) basic events.
/// @throws ResourceLimitError  More than `max_events` such events.
CutSetResult brute_force_cut_sets(const FlattenedTree& tree,
                                  std::size_t max_events = 20);

}  // namespace ghcft
