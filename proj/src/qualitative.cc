#include "ghcft/qualitative.h"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "ghcft/error.h"

namespace ghcft {

PathEnumeration enumerate_error_paths(const CmcElement& cmc,
                                      const std::string& error_state) {
  if (!cmc.is_error_state(error_state))
    throw LookupError("'" + error_state + "' is not an error state");

  PathEnumeration result;
  if (cmc.initial == error_state) {
    result.paths.emplace_back();
    return result;
  }
  std::set<std::string> on_path = {cmc.initial};
  TransitionPath path;
  std::function<void(const std::string&)> extend = [&](const std::string& s) {
    for (std::size_t i = 0; i < cmc.transitions.size(); ++i) {
      const Transition& t = cmc.transitions[i];
      if (t.from != s || on_path.count(t.to)) continue;
      path.push_back(i);
      if (t.to == error_state) {
        result.paths.push_back(path);
      } else {
        on_path.insert(t.to);
        extend(t.to);
        on_path.erase(t.to);
      }
      path.pop_back();
    }
  };
  extend(cmc.initial);
  if (result.paths.empty())
    result.warnings.push_back("error state '" + error_state +
                              "' is unreachable from initial state '" +
                              cmc.initial + "'");
  return result;
}

std::string transition_event_id(const Transition& t) {
  return "t_" + t.from + "_" + t.to;
}

namespace {

/// Hands out identifiers that do not collide with already used ones.
class NameAllocator {
 public:
  void Reserve(const std::string& id) { used_.insert(id); }

  std::string Take(std::string id) {
    while (!used_.insert(id).second) id += "_";
    return id;
  }

 private:
  std::set<std::string> used_;
};

}  // namespace

CftElement cmc_to_cft(const CmcElement& cmc,
                      std::vector<std::string>* warnings) {
  CftElement cft;
  NameAllocator names;
  for (const auto& ifm : cmc.ifms) names.Reserve(ifm.id);
  for (const auto& ofm : cmc.ofms) names.Reserve(ofm.id);
  cft.ifms = cmc.ifms;

  // Step 1: one node per transition.
  std::vector<std::string> transition_node;
  for (const auto& t : cmc.transitions) {
    std::string event = names.Take(transition_event_id(t));
    cft.events.push_back({event, t.rate, t.rate.is_zero()});
    auto deps = cmc.dependencies(t);
    if (deps.empty()) {
      transition_node.push_back(event);
      continue;
    }
    Gate gate{names.Take("or_" + event), GateKind::kOr, deps};
    gate.inputs.push_back(event);
    transition_node.push_back(gate.id);
    cft.gates.push_back(std::move(gate));
  }

  // Step 2: per OFM, an AND per path and an OR over paths.
  for (const auto& ofm : cmc.ofms) {
    std::vector<std::string> path_nodes;
    for (const auto& state : cmc.error_states_of(ofm.id)) {
      if (!cmc.is_error_state(state)) continue;
      PathEnumeration found = enumerate_error_paths(cmc, state);
      if (warnings)
        warnings->insert(warnings->end(), found.warnings.begin(),
                         found.warnings.end());
      for (const auto& path : found.paths) {
        if (path.empty())
          throw DomainError("output failure mode '" + ofm.id +
                            "' is bound to the initial state '" + state +
                            "' and would always be active");
        if (path.size() == 1) {
          path_nodes.push_back(transition_node[path.front()]);
          continue;
        }
        Gate gate{names.Take("and_" + ofm.id + "_" +
                             std::to_string(path_nodes.size() + 1)),
                  GateKind::kAnd,
                  {}};
        for (std::size_t index : path)
          gate.inputs.push_back(transition_node[index]);
        path_nodes.push_back(gate.id);
        cft.gates.push_back(std::move(gate));
      }
    }
    std::string feed;
    if (path_nodes.empty()) {
      feed = names.Take("unreachable_" + ofm.id);
      cft.events.push_back({feed, Rate{}, true});
    } else if (path_nodes.size() == 1) {
      feed = path_nodes.front();
    } else {
      Gate gate{names.Take("or_" + ofm.id), GateKind::kOr, path_nodes};
      feed = gate.id;
      cft.gates.push_back(std::move(gate));
    }
    cft.ofms.push_back({ofm.id, ofm.port, feed});
  }
  return cft;
}

FlattenedTree::FlattenedTree(std::vector<Node> nodes, std::size_t top,
                             std::string label)
    : nodes_(std::move(nodes)), top_(top), label_(std::move(label)) {
  if (top_ >= nodes_.size())
    throw DomainError("flattened tree top index out of range");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t child : nodes_[i].children) {
      if (child >= i)
        throw DomainError("flattened tree nodes must list children first");
    }
    if (nodes_[i].kind == Kind::kEvent && !nodes_[i].children.empty())
      throw DomainError("event node '" + nodes_[i].id + "' has children");
  }
}

std::vector<std::size_t> FlattenedTree::events() const {
  std::vector<std::size_t> result;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == Kind::kEvent) result.push_back(i);
  std::sort(result.begin(), result.end(), [this](std::size_t a, std::size_t b) {
    return nodes_[a].id < nodes_[b].id;
  });
  return result;
}

std::vector<std::string> FlattenedTree::leaf_ids() const {
  std::vector<std::string> result;
  for (std::size_t i : events()) result.push_back(nodes_[i].id);
  return result;
}

bool FlattenedTree::evaluate(const std::vector<bool>& occurred) const {
  std::vector<bool> value(nodes_.size(), false);
  for (std::size_t i = 0; i <= top_; ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Kind::kEvent:
        value[i] = !n.never_occurs && i < occurred.size() && occurred[i];
        break;
      case Kind::kAnd:
        value[i] = std::all_of(n.children.begin(), n.children.end(),
                               [&](std::size_t c) { return value[c]; });
        break;
      case Kind::kOr:
        value[i] = std::any_of(n.children.begin(), n.children.end(),
                               [&](std::size_t c) { return value[c]; });
        break;
    }
  }
  return value[top_];
}

namespace {

class Flattener {
 public:
  Flattener(const SystemModel& model, const FlattenOptions& options)
      : model_(model), options_(options) {
    for (const auto& component : model.components) {
      elements_.emplace(component.id, component.is_cft()
                                          ? component.cft()
                                          : cmc_to_cft(component.cmc()));
    }
  }

  FlattenedTree Run(const FailureModeRef& top) {
    const Component* component = model_.find(top.component);
    if (!component)
      throw LookupError("unknown component '" + top.component + "'");
    const CftOutputFailureMode* ofm =
        elements_.at(component->id).find_ofm(top.mode);
    if (!ofm)
      throw LookupError("'" + top.str() + "' is not an output failure mode");
    std::optional<std::size_t> root = Build(*component, ofm->input);
    std::size_t top_index;
    if (root) {
      top_index = *root;
    } else {
      nodes_.push_back({FlattenedTree::Kind::kOr, top.str(), {}, false, 0});
      top_index = nodes_.size() - 1;
    }
    return FlattenedTree(std::move(nodes_), top_index, top.str());
  }

 private:
  using Kind = FlattenedTree::Kind;

  std::optional<std::size_t> Build(const Component& component,
                                   const std::string& local) {
    std::string key = component.id + "." + local;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!in_progress_.insert(key).second)
      throw DomainError("cyclic failure propagation through '" + key + "'");
    std::optional<std::size_t> result = BuildUncached(component, local, key);
    in_progress_.erase(key);
    memo_.emplace(key, result);
    return result;
  }

  std::optional<std::size_t> BuildUncached(const Component& component,
                                           const std::string& local,
                                           const std::string& key) {
    const CftElement& cft = elements_.at(component.id);
    if (const BasicEvent* event = cft.find_event(local)) {
      return Add({Kind::kEvent, key, {}, event->never_occurs,
                  event->never_occurs ? 0.0 : event->rate.per_hour()});
    }
    if (const Gate* gate = cft.find_gate(local)) {
      std::vector<std::size_t> children;
      for (const auto& input : gate->inputs) {
        auto child = Build(component, input);
        if (!child) {
          if (gate->kind == GateKind::kAnd) return std::nullopt;
          continue;
        }
        if (std::find(children.begin(), children.end(), *child) ==
            children.end())
          children.push_back(*child);
      }
      return Combine(gate->kind, key, std::move(children));
    }
    if (const InputFailureMode* ifm = cft.find_ifm(local)) {
      auto sources = model_.resolve_input(component, *ifm);
      if (sources.empty() && options_.strict)
        throw DomainError("input failure mode '" + key +
                          "' has no connected source (strict mode)");
      std::vector<std::size_t> children;
      for (const auto& source : sources) {
        const Component& upstream = *model_.find(source.component);
        const CftOutputFailureMode* ofm =
            elements_.at(upstream.id).find_ofm(source.mode);
        if (auto child = Build(upstream, ofm->input);
            child && std::find(children.begin(), children.end(), *child) ==
                         children.end())
          children.push_back(*child);
      }
      return Combine(GateKind::kOr, key, std::move(children));
    }
    throw LookupError("unknown node '" + key + "'");
  }

  std::optional<std::size_t> Combine(GateKind kind, const std::string& key,
                                     std::vector<std::size_t> children) {
    if (children.empty()) return std::nullopt;
    if (children.size() == 1) return children.front();
    return Add({kind == GateKind::kAnd ? Kind::kAnd : Kind::kOr, key,
                std::move(children), false, 0});
  }

  std::size_t Add(FlattenedTree::Node node) {
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  const SystemModel& model_;
  const FlattenOptions& options_;
  std::map<std::string, CftElement> elements_;
  std::map<std::string, std::optional<std::size_t>> memo_;
  std::set<std::string> in_progress_;
  std::vector<FlattenedTree::Node> nodes_;
};

}  // namespace

FlattenedTree flatten_ghcft(const SystemModel& model, const FailureModeRef& top,
                            const FlattenOptions& options) {
  return Flattener(model, options).Run(top);
}

void normalize(CutSetResult& result) {
  for (auto& set : result.cut_sets) std::sort(set.begin(), set.end());
  std::sort(result.cut_sets.begin(), result.cut_sets.end(),
            [](const CutSet& a, const CutSet& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
}

namespace {

using IndexSet = std::vector<std::size_t>;  // sorted

void InsertSorted(IndexSet& set, std::size_t value) {
  auto it = std::lower_bound(set.begin(), set.end(), value);
  if (it == set.end() || *it != value) set.insert(it, value);
}

bool Subsumes(const IndexSet& small, const IndexSet& big) {
  return small.size() <= big.size() &&
         std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

CutSetResult minimal_cut_sets(const FlattenedTree& tree,
                              const McsOptions& options) {
  using Kind = FlattenedTree::Kind;
  struct Row {
    IndexSet gates;
    IndexSet events;
  };

  std::vector<IndexSet> found;
  std::set<IndexSet> found_index;
  std::vector<Row> stack;
  {
    Row start;
    const auto& top = tree.node(tree.top());
    if (top.kind == Kind::kEvent) {
      if (!top.never_occurs) start.events.push_back(tree.top());
      if (!top.never_occurs) stack.push_back(std::move(start));
    } else {
      start.gates.push_back(tree.top());
      stack.push_back(std::move(start));
    }
  }

  auto check_cap = [&] {
    if (stack.size() + found.size() > options.max_sets)
      throw ResourceLimitError("cut set expansion exceeded the cap of " +
                               std::to_string(options.max_sets) +
                               " intermediate sets");
  };

  while (!stack.empty()) {
    Row row = std::move(stack.back());
    stack.pop_back();
    if (std::any_of(found.begin(), found.end(), [&](const IndexSet& f) {
          return Subsumes(f, row.events);
        }))
      continue;
    if (row.gates.empty()) {
      if (found_index.insert(row.events).second) found.push_back(row.events);
      check_cap();
      continue;
    }
    std::size_t gate = row.gates.back();
    row.gates.pop_back();
    const auto& node = tree.node(gate);
    auto add_child = [&](Row& target, std::size_t child) {
      const auto& c = tree.node(child);
      if (c.kind != Kind::kEvent) {
        InsertSorted(target.gates, child);
        return true;
      }
      if (c.never_occurs) return false;
      InsertSorted(target.events, child);
      return true;
    };
    if (node.kind == Kind::kAnd) {
      bool alive = true;
      for (std::size_t child : node.children)
        alive = alive && add_child(row, child);
      if (alive) stack.push_back(std::move(row));
    } else {
      for (std::size_t child : node.children) {
        Row copy = row;
        if (add_child(copy, child)) stack.push_back(std::move(copy));
      }
    }
    check_cap();
  }

  std::sort(found.begin(), found.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  std::vector<IndexSet> minimal;
  for (const auto& set : found) {
    if (std::none_of(minimal.begin(), minimal.end(),
                     [&](const IndexSet& m) { return Subsumes(m, set); }))
      minimal.push_back(set);
  }

  CutSetResult result{tree.label(), {}};
  for (const auto& set : minimal) {
    CutSet ids;
    for (std::size_t i : set) ids.push_back(tree.node(i).id);
    result.cut_sets.push_back(std::move(ids));
  }
  normalize(result);
  return result;
}

}  // namespace ghcft
