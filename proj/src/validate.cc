#include "ghcft/validate.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "ghcft/error.h"

namespace ghcft {

std::string_view to_string(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

bool ValidationReport::ok() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
  return std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
    return f.severity == Severity::kError;
  });
}

namespace {

class Checker {
 public:
  explicit Checker(const SystemModel& model) : model_(model) {}

  ValidationReport Run() {
    CheckComponentIds();
    CheckConnections();
    for (const auto& component : model_.components) {
      CheckPorts(component);
      if (component.is_cft())
        CheckCft(component, component.cft());
      else
        CheckCmc(component, component.cmc());
      CheckInputs(component);
    }
    std::stable_sort(findings_.begin(), findings_.end(),
                     [](const Finding& a, const Finding& b) {
                       return std::tie(a.component, a.code) <
                              std::tie(b.component, b.code);
                     });
    return {std::move(findings_)};
  }

 private:
  void Error(std::string component, std::string code, std::string location,
             std::string message) {
    findings_.push_back({Severity::kError, std::move(code), std::move(message),
                         std::move(component), std::move(location)});
  }
  void Warn(std::string component, std::string code, std::string location,
            std::string message) {
    findings_.push_back({Severity::kWarning, std::move(code),
                         std::move(message), std::move(component),
                         std::move(location)});
  }

  void CheckComponentIds() {
    std::set<std::string> seen;
    for (const auto& component : model_.components) {
      if (!seen.insert(component.id).second)
        Error(component.id, "duplicate-component", "",
              "component '" + component.id + "' is declared more than once");
      if (component.id.empty() ||
          component.id.find('.') != std::string::npos)
        Error(component.id, "invalid-identifier", "",
              "component id '" + component.id +
                  "' must be nonempty and must not contain '.'");
    }
  }

  void CheckConnections() {
    std::map<PortRef, int> fan_in;
    for (const auto& connection : model_.connections) {
      std::string where =
          connection.from.component + "." + connection.from.port + " -> " +
          connection.to.component + "." + connection.to.port;
      bool endpoints_ok = true;
      const Component* source = model_.find(connection.from.component);
      const Component* target = model_.find(connection.to.component);
      if (!source) {
        Error("", "connection-unknown-component", where,
              "connection source component '" + connection.from.component +
                  "' does not exist");
        endpoints_ok = false;
      } else if (!source->has_outport(connection.from.port)) {
        Error("", "connection-unknown-port", where,
              "'" + connection.from.port + "' is not an outport of '" +
                  source->id + "'");
        endpoints_ok = false;
      }
      if (!target) {
        Error("", "connection-unknown-component", where,
              "connection target component '" + connection.to.component +
                  "' does not exist");
        endpoints_ok = false;
      } else if (!target->has_inport(connection.to.port)) {
        Error("", "connection-unknown-port", where,
              "'" + connection.to.port + "' is not an inport of '" +
                  target->id + "'");
        endpoints_ok = false;
      }
      if (connection.from.component == connection.to.component)
        Error(connection.from.component, "self-connection", where,
              "a component cannot be connected to itself");
      if (endpoints_ok && ++fan_in[connection.to] == 2)
        Error(connection.to.component, "inport-multiply-connected",
              connection.to.port,
              "inport '" + connection.to.port +
                  "' is the target of more than one connection");
    }
    try {
      topological_order(model_);
    } catch (const CyclicDependencyError& err) {
      Error("", "cyclic-dependency", "", err.what());
    }
  }

  void CheckPorts(const Component& component) {
    std::set<std::string> names;
    for (const auto* ports : {&component.inports, &component.outports}) {
      for (const auto& port : *ports) {
        if (!names.insert(port).second)
          Error(component.id, "duplicate-port", port,
                "port '" + port + "' is declared more than once");
      }
    }
  }

  template <class Ofm>
  void CheckFailureModePorts(const Component& component,
                             const std::vector<InputFailureMode>& ifms,
                             const std::vector<Ofm>& ofms) {
    for (const auto& ifm : ifms) {
      if (!component.has_inport(ifm.port))
        Error(component.id, "ifm-unknown-port", ifm.id,
              "input failure mode '" + ifm.id + "' binds '" + ifm.port +
                  "', which is not an inport");
    }
    for (const auto& ofm : ofms) {
      if (!component.has_outport(ofm.port))
        Error(component.id, "ofm-unknown-port", ofm.id,
              "output failure mode '" + ofm.id + "' binds '" + ofm.port +
                  "', which is not an outport");
    }
  }

  void CheckCft(const Component& component, const CftElement& cft) {
    std::set<std::string> ids;
    auto declare = [&](const std::string& id) {
      if (!ids.insert(id).second)
        Error(component.id, "duplicate-node", id,
              "node id '" + id + "' is declared more than once");
    };
    for (const auto& e : cft.events) declare(e.id);
    for (const auto& g : cft.gates) declare(g.id);
    for (const auto& i : cft.ifms) declare(i.id);
    for (const auto& o : cft.ofms) declare(o.id);

    auto is_node = [&](const std::string& id) {
      return cft.find_event(id) || cft.find_gate(id) || cft.find_ifm(id);
    };
    for (const auto& gate : cft.gates) {
      if (gate.inputs.empty())
        Error(component.id, "gate-without-inputs", gate.id,
              "gate '" + gate.id + "' has no inputs");
      for (const auto& input : gate.inputs) {
        if (!is_node(input))
          Error(component.id, "unknown-node", gate.id,
                "gate '" + gate.id + "' references unknown node '" + input +
                    "'");
      }
    }
    for (const auto& ofm : cft.ofms) {
      if (ofm.input.empty())
        Error(component.id, "ofm-without-input", ofm.id,
              "output failure mode '" + ofm.id + "' has no feeding node");
      else if (!is_node(ofm.input))
        Error(component.id, "unknown-node", ofm.id,
              "output failure mode '" + ofm.id + "' references unknown node '" +
                  ofm.input + "'");
    }
    CheckFailureModePorts(component, cft.ifms, cft.ofms);
    CheckGateCycles(component, cft);
  }

  void CheckGateCycles(const Component& component, const CftElement& cft) {
    enum class Mark { kNone, kActive, kDone };
    std::map<std::string, Mark> marks;
    std::function<bool(const Gate&)> visit = [&](const Gate& gate) {
      Mark& mark = marks[gate.id];
      if (mark == Mark::kActive) return true;
      if (mark == Mark::kDone) return false;
      mark = Mark::kActive;
      for (const auto& input : gate.inputs) {
        if (const Gate* child = cft.find_gate(input); child && visit(*child))
          return true;
      }
      marks[gate.id] = Mark::kDone;
      return false;
    };
    for (const auto& gate : cft.gates) {
      if (marks[gate.id] == Mark::kNone && visit(gate)) {
        Error(component.id, "cft-cycle", gate.id,
              "the gate graph is not acyclic (cycle through '" + gate.id +
                  "')");
        return;
      }
    }
  }

  void CheckCmc(const Component& component, const CmcElement& cmc) {
    const std::string& cid = component.id;
    std::set<std::string> states;
    if (cmc.states.empty())
      Error(cid, "no-states", "", "the Markov chain has no states");
    for (const auto& s : cmc.states) {
      if (!states.insert(s).second)
        Error(cid, "duplicate-state", s,
              "state '" + s + "' is declared more than once");
    }
    if (!states.count(cmc.initial))
      Error(cid, "initial-not-state", cmc.initial,
            "initial state '" + cmc.initial + "' is not a declared state");
    for (const auto& s : cmc.error_states) {
      if (!states.count(s))
        Error(cid, "error-not-state", s,
              "error state '" + s + "' is not a declared state");
    }

    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& t : cmc.transitions) {
      std::string where = t.from + " -> " + t.to;
      if (!states.count(t.from) || !states.count(t.to))
        Error(cid, "transition-unknown-state", where,
              "transition " + where + " references an undeclared state");
      if (t.from == t.to)
        Error(cid, "self-loop", where,
              "self-loop transitions are not allowed (" + where + ")");
      if (!pairs.insert({t.from, t.to}).second)
        Error(cid, "duplicate-transition", where,
              "more than one transition " + where +
                  "; pre-sum parallel rates into one");
    }

    std::set<std::string> modes;
    for (const auto& ifm : cmc.ifms) {
      if (!modes.insert(ifm.id).second)
        Error(cid, "duplicate-failure-mode", ifm.id,
              "failure mode '" + ifm.id + "' is declared more than once");
    }
    for (const auto& ofm : cmc.ofms) {
      if (!modes.insert(ofm.id).second)
        Error(cid, "duplicate-failure-mode", ofm.id,
              "failure mode '" + ofm.id + "' is declared more than once");
    }
    CheckFailureModePorts(component, cmc.ifms, cmc.ofms);

    for (const auto& dep : cmc.input_deps) {
      std::string where = dep.ifm + " @ " + dep.from + " -> " + dep.to;
      if (!cmc.find_ifm(dep.ifm))
        Error(cid, "di-unknown-ifm", where,
              "input dependency names undeclared input failure mode '" +
                  dep.ifm + "'");
      if (!cmc.find_transition(dep.from, dep.to))
        Error(cid, "di-unknown-transition", where,
              "input dependency names missing transition " + dep.from +
                  " -> " + dep.to);
    }
    for (const auto& dep : cmc.output_deps) {
      std::string where = dep.state + " -> " + dep.ofm;
      if (!cmc.is_error_state(dep.state))
        Error(cid, "do-not-error-state", where,
              "output dependency state '" + dep.state +
                  "' is not an error state");
      if (!cmc.find_ofm(dep.ofm))
        Error(cid, "do-unknown-ofm", where,
              "output dependency names undeclared output failure mode '" +
                  dep.ofm + "'");
    }
    for (const auto& ofm : cmc.ofms) {
      if (cmc.error_states_of(ofm.id).empty())
        Error(cid, "ofm-without-dependency", ofm.id,
              "output failure mode '" + ofm.id +
                  "' is not bound to any error state");
    }

    // Structural reachability, ignoring rate magnitudes.
    std::set<std::string> reached;
    std::vector<std::string> stack;
    if (states.count(cmc.initial)) {
      reached.insert(cmc.initial);
      stack.push_back(cmc.initial);
    }
    while (!stack.empty()) {
      std::string s = stack.back();
      stack.pop_back();
      for (const auto& t : cmc.transitions) {
        if (t.from == s && reached.insert(t.to).second) stack.push_back(t.to);
      }
    }
    for (const auto& dep : cmc.output_deps) {
      if (states.count(dep.state) && !reached.count(dep.state))
        Warn(cid, "unreachable-error-state", dep.state,
             "error state '" + dep.state +
                 "' cannot be reached from the initial state");
    }
  }

  void CheckInputs(const Component& component) {
    for (const auto& ifm : component.ifms()) {
      if (!component.has_inport(ifm.port)) continue;
      const Connection* connection =
          model_.connection_into({component.id, ifm.port});
      if (!connection) {
        Warn(component.id, "unconnected-input", ifm.id,
             "inport '" + ifm.port + "' is unconnected; input failure mode '" +
                 ifm.id + "' never occurs");
        continue;
      }
      const Component* source = model_.find(connection->from.component);
      if (!source || !source->has_outport(connection->from.port)) continue;
      auto modes = source->ofms_on(connection->from.port);
      if (!ifm.mode.empty() &&
          std::find(modes.begin(), modes.end(), ifm.mode) == modes.end()) {
        Error(component.id, "ifm-unknown-mode", ifm.id,
              "input failure mode '" + ifm.id + "' selects '" + ifm.mode +
                  "', which '" + source->id + "." + connection->from.port +
                  "' does not carry");
      } else if (modes.empty()) {
        Warn(component.id, "input-without-source-mode", ifm.id,
             "'" + source->id + "." + connection->from.port +
                 "' carries no output failure mode; '" + ifm.id +
                 "' never occurs");
      }
    }
  }

  const SystemModel& model_;
  std::vector<Finding> findings_;
};

}  // namespace

ValidationReport validate_model(const SystemModel& model) {
  return Checker(model).Run();
}

double effective_rate(const CmcElement& cmc, const Transition& transition,
                      const IfmRates& ifm_rates) {
  double rate = transition.rate.per_hour();
  for (const auto& ifm : cmc.dependencies(transition)) {
    auto it = ifm_rates.find(ifm);
    if (it == ifm_rates.end())
      throw UnresolvedInputError("no rate for input failure mode '" + ifm +
                                 "' (transition " + transition.from + " -> " +
                                 transition.to + ")");
    rate += it->second;
  }
  return rate;
}

std::vector<std::string> topological_order(const SystemModel& model) {
  std::map<std::string, std::set<std::string>> successors;
  std::map<std::string, int> in_degree;
  for (const auto& component : model.components) {
    successors[component.id];
    in_degree[component.id];
  }
  for (const auto& connection : model.connections) {
    const auto& from = connection.from.component;
    const auto& to = connection.to.component;
    if (!successors.count(from) || !successors.count(to)) continue;
    if (successors[from].insert(to).second) ++in_degree[to];
  }

  std::set<std::string> ready;
  for (const auto& [id, degree] : in_degree)
    if (degree == 0) ready.insert(id);
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& next : successors[id])
      if (--in_degree[next] == 0) ready.insert(next);
  }
  if (order.size() == successors.size()) return order;

  // Walk backwards through unresolved nodes until one repeats.
  std::map<std::string, std::string> some_predecessor;
  for (const auto& [from, tos] : successors) {
    if (in_degree[from] == 0) continue;
    for (const auto& to : tos)
      if (in_degree[to] > 0) some_predecessor.emplace(to, from);
  }
  std::string node = some_predecessor.begin()->first;
  std::vector<std::string> walk;
  std::set<std::string> seen;
  while (seen.insert(node).second) {
    walk.push_back(node);
    node = some_predecessor.at(node);
  }
  auto start = std::find(walk.begin(), walk.end(), node);
  std::vector<std::string> cycle(start, walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
  cycle.push_back(cycle.front());
  std::string text;
  for (const auto& id : cycle) text += (text.empty() ? "" : " -> ") + id;
  throw CyclicDependencyError(cycle, "cyclic component dependency: " + text);
}

}  // namespace ghcft
