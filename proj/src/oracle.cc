#include "ghcft/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "ghcft/error.h"

namespace ghcft {

namespace {

constexpr std::uint64_t kChunkRuns = 4096;

struct Edge {
  std::size_t to;
  double rate;
};

struct ChunkTally {
  std::uint64_t hits = 0;
  std::uint64_t censored = 0;
  double mean = 0;  // Welford accumulators over hitting times
  double m2 = 0;
};

void Merge(ChunkTally& into, const ChunkTally& part) {
  if (part.hits == 0) {
    into.censored += part.censored;
    return;
  }
  double n1 = static_cast<double>(into.hits);
  double n2 = static_cast<double>(part.hits);
  double delta = part.mean - into.mean;
  double n = n1 + n2;
  into.mean += delta * n2 / n;
  into.m2 += part.m2 + delta * delta * n1 * n2 / n;
  into.hits += part.hits;
  into.censored += part.censored;
}

ChunkTally RunChunk(const std::vector<std::vector<Edge>>& edges,
                    std::size_t initial, std::size_t target, double horizon,
                    std::uint64_t runs, std::uint64_t stream_seed) {
  SplitMix64 rng(stream_seed);
  ChunkTally tally;
  for (std::uint64_t run = 0; run < runs; ++run) {
    std::size_t state = initial;
    double time = 0;
    bool hit = false;
    while (true) {
      const auto& out = edges[state];
      if (out.empty()) break;
      double total = 0;
      for (const auto& e : out) total += e.rate;
      time += -std::log(rng.uniform_open0()) / total;
      if (time > horizon) break;
      double pick = (1 - rng.uniform_open0()) * total;
      std::size_t next = out.back().to;
      for (const auto& e : out) {
        if (pick < e.rate) {
          next = e.to;
          break;
        }
        pick -= e.rate;
      }
      state = next;
      if (state == target) {
        hit = true;
        break;
      }
    }
    if (!hit) {
      ++tally.censored;
      continue;
    }
    ++tally.hits;
    double delta = time - tally.mean;
    tally.mean += delta / static_cast<double>(tally.hits);
    tally.m2 += delta * (time - tally.mean);
  }
  return tally;
}

}  // namespace

SimulationEstimate simulate_first_passage(const CmcElement& cmc,
                                          const IfmRates& ifm_rates,
                                          std::string_view target,
                                          const SimulationOptions& options) {
  if (options.runs == 0) throw DomainError("simulation needs at least one run");
  if (!(options.horizon >= 0)) throw DomainError("horizon must be positive");
  auto index = [&](std::string_view s) {
    auto it = std::find(cmc.states.begin(), cmc.states.end(), s);
    if (it == cmc.states.end())
      throw DomainError("unknown state '" + std::string(s) + "'");
    return static_cast<std::size_t>(it - cmc.states.begin());
  };
  const std::size_t goal = index(target);
  const std::size_t initial = index(cmc.initial);
  if (goal == initial)
    throw DomainError("target is the initial state; first-passage time is zero");

  std::vector<std::vector<Edge>> edges(cmc.states.size());
  double min_rate = std::numeric_limits<double>::infinity();
  for (const auto& t : cmc.transitions) {
    double rate = t.rate.per_hour();
    for (const auto& dep : cmc.input_deps) {
      if (dep.from != t.from || dep.to != t.to) continue;
      auto it = ifm_rates.find(dep.ifm);
      if (it == ifm_rates.end())
        throw UnresolvedInputError("no rate for input failure mode '" +
                                   dep.ifm + "'");
      rate += it->second;
    }
    if (rate > 0) {
      edges[index(t.from)].push_back({index(t.to), rate});
      min_rate = std::min(min_rate, rate);
    }
  }
  edges[goal].clear();

  SimulationEstimate estimate;
  estimate.runs = options.runs;
  estimate.seed = options.seed;
  estimate.horizon = options.horizon > 0
                         ? options.horizon
                         : std::min(1e12, std::isfinite(min_rate)
                                              ? 100 / min_rate
                                              : 1e12);

  const std::uint64_t chunks = (options.runs + kChunkRuns - 1) / kChunkRuns;
  std::vector<ChunkTally> tallies(chunks);
  auto work = [&](unsigned worker, unsigned stride) {
    for (std::uint64_t c = worker; c < chunks; c += stride) {
      std::uint64_t runs = std::min(kChunkRuns, options.runs - c * kChunkRuns);
      std::uint64_t stream =
          SplitMix64(options.seed + 0x632be59bd9b4e019ULL * (c + 1)).next();
      tallies[c] = RunChunk(edges, initial, goal, estimate.horizon, runs, stream);
    }
  };
  unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w, workers);
    for (auto& th : threads) th.join();
  }

  ChunkTally total;
  for (const auto& tally : tallies) Merge(total, tally);
  estimate.hits = total.hits;
  estimate.censored = total.censored;
  if (total.hits == 0) {
    estimate.diagnostics.push_back("target '" + std::string(target) +
                                   "' was never reached; rate estimate is 0");
    return estimate;
  }
  estimate.mean_first_passage = total.mean;
  estimate.rate_estimate = 1 / total.mean;
  double variance =
      total.hits > 1 ? total.m2 / static_cast<double>(total.hits - 1) : 0;
  double se_mean = std::sqrt(variance / static_cast<double>(total.hits));
  estimate.std_error = se_mean / (total.mean * total.mean);
  if (total.censored > 0)
    estimate.diagnostics.push_back(std::to_string(total.censored) +
                                   " runs censored at the horizon; the mean over hitting runs "
                                   "underestimates the first-passage time");
  return estimate;
}

CutSetResult brute_force_cut_sets(const FlattenedTree& tree,
                                  std::size_t max_events) {
  std::vector<std::size_t> vars;
  for (std::size_t i : tree.events())
    if (!tree.node(i).never_occurs) vars.push_back(i);
  if (vars.size() > max_events)
    throw ResourceLimitError("brute-force enumeration is capped at " +
                             std::to_string(max_events) + " events, tree has " +
                             std::to_string(vars.size()));
  const std::size_t n = vars.size();
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<bool> truth(count);
  std::vector<bool> occurred(tree.nodes().size(), false);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t b = 0; b < n; ++b) occurred[vars[b]] = (mask >> b) & 1;
    truth[mask] = tree.evaluate(occurred);
  }
  CutSetResult result{tree.label(), {}};
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    if (!truth[mask]) continue;
    bool minimal = true;
    for (std::size_t b = 0; b < n && minimal; ++b) {
      std::uint64_t bit = std::uint64_t{1} << b;
      if ((mask & bit) && truth[mask ^ bit]) minimal = false;
    }
    if (!minimal) continue;
    CutSet set;
    for (std::size_t b = 0; b < n; ++b)
      if ((mask >> b) & 1) set.push_back(tree.node(vars[b]).id);
    result.cut_sets.push_back(std::move(set));
  }
  normalize(result);
  return result;
}

}  // namespace ghcft
