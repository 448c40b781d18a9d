/// @file qualitative.h
/// Qualitative analysis: CMC to CFT transformation, flattening of a
/// composed model into a single fault tree, and minimal cut sets.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ghcft/model.h"

namespace ghcft {

/// A path through a CMC as indices into `CmcElement::transitions`.
using TransitionPath = std::vector<std::size_t>;

struct PathEnumeration {
  std::vector<TransitionPath> paths;
  std::vector<std::string> warnings;
};

/// All simple paths (no repeated state) from the initial state to
/// `error_state`, depth-first in transition declaration order.
/// An unreachable error state yields no paths and a warning;
/// an initial state that is the error state yields one empty path.
/// @throws LookupError  `error_state` is not an error state of `cmc`.
PathEnumeration enumerate_error_paths(const CmcElement& cmc,
                                      const std::string& error_state);

/// Id of the synthetic basic event standing for a transition.
std::string transition_event_id(const Transition& t);

/// Rewrites a CMC as an equivalent CFT element for qualitative analysis.
///
/// Every transition becomes a basic event `t_<from>_<to>`; zero-rate
/// transitions are marked never-occurring. A transition with input
/// dependencies becomes an OR of its event and those IFMs. Each OFM is fed
/// by an AND over each simple path to its error states, and an OR over
/// several paths. One-input gates are not created.
///
/// @param[out] warnings  Receives one entry per unreachable error state.
CftElement cmc_to_cft(const CmcElement& cmc,
                      std::vector<std::string>* warnings = nullptr);

/// A single fault tree over qualified basic events, restricted to the
/// cone of influence of one top event.
class FlattenedTree {
 public:
  enum class Kind { kEvent, kAnd, kOr };

  struct Node {
    Kind kind = Kind::kEvent;
    std::string id;                     ///< Qualified `component.local`.
    std::vector<std::size_t> children;  ///< Empty for events.
    bool never_occurs = false;          ///< Events only.
    double rate = 0;                    ///< Events only, per hour.
  };

  FlattenedTree() = default;
  FlattenedTree(std::vector<Node> nodes, std::size_t top, std::string label);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t top() const { return top_; }
  /// Name of the analyzed top event, `component.ofm`.
  const std::string& label() const { return label_; }

  /// Indices of event nodes, sorted by id.
  std::vector<std::size_t> events() const;
  /// Ids of all event leaves, sorted.
  std::vector<std::string> leaf_ids() const;

  /// Evaluates the Boolean function. `occurred` is indexed by node;
  /// only event entries are read. Never-occurring events are false.
  bool evaluate(const std::vector<bool>& occurred) const;

 private:
  std::vector<Node> nodes_;
  std::size_t top_ = 0;
  std::string label_;
};

struct FlattenOptions {
  /// Reject unconnected IFMs inside the cone instead of pruning them.
  bool strict = false;
};

/// Composes the model into one fault tree for `top`.
///
/// CMC components are replaced by their `cmc_to_cft` form, IFMs by the
/// subtree feeding the connected OFM, and event ids are qualified with
/// their component id. Unconnected IFMs are pruned as never failing;
/// a top event that can never occur is an OR node without children.
///
/// @throws LookupError  `top` is not an output failure mode.
/// @throws DomainError  Strict mode and a dangling IFM lies in the cone.
FlattenedTree flatten_ghcft(const SystemModel& model, const FailureModeRef& top,
                            const FlattenOptions& options = {});

using CutSet = std::vector<std::string>;

struct CutSetResult {
  std::string top;
  /// Each set sorted; sets ordered by size, then lexicographically.
  std::vector<CutSet> cut_sets;

  bool operator==(const CutSetResult&) const = default;
};

/// Sorts members and orders the sets canonically.
void normalize(CutSetResult& result);

struct McsOptions {
  /// Upper bound on intermediate rows held during expansion.
  std::size_t max_sets = 1'000'000;
};

/// Minimal cut sets by top-down (MOCUS) expansion with subsumption.
/// @throws ResourceLimitError  More than `max_sets` intermediate rows.
CutSetResult minimal_cut_sets(const FlattenedTree& tree,
                              const McsOptions& options = {});

}  // namespace ghcft
