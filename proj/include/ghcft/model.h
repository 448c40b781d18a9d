/// @file model.h
/// Domain types of a system model: components, ports, connections,
/// and the two kinds of failure logic a component may carry
/// (component fault tree elements and component Markov chain elements).
///
/// All types are plain values. Identifiers are scoped to their owner:
/// node ids to a CFT element, state ids to a CMC element,
/// port ids to a component.

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ghcft/rate.h"

namespace ghcft {

/// `component.port`.
struct PortRef {
  std::string component;
  std::string port;

  auto operator<=>(const PortRef&) const = default;
};

/// `component.failure_mode`; used to name top events and OFMs globally.
struct FailureModeRef {
  std::string component;
  std::string mode;

  /// Splits at the first '.'; component ids never contain dots.
  /// @throws LookupError  No dot, or an empty side.
  static FailureModeRef Parse(std::string_view text);
  std::string str() const { return component + "." + mode; }

  auto operator<=>(const FailureModeRef&) const = default;
};

/// Directed information flow from an outport to an inport.
struct Connection {
  PortRef from;
  PortRef to;

  auto operator<=>(const Connection&) const = default;
};

enum class GateKind { kAnd, kOr };

std::string_view to_string(GateKind kind);

struct BasicEvent {
  std::string id;
  Rate rate;
  /// Constant false in the Boolean function. Set for synthetic events
  /// that stand for transitions with no intrinsic rate.
  bool never_occurs = false;

  bool operator==(const BasicEvent&) const = default;
};

struct Gate {
  std::string id;
  GateKind kind = GateKind::kOr;
  std::vector<std::string> inputs;

  bool operator==(const Gate&) const = default;
};

/// An input failure mode bound to an inport.
///
/// When the connected outport carries several output failure modes,
/// `mode` selects one of them; empty means all of them.
struct InputFailureMode {
  std::string id;
  std::string port;
  std::string mode;

  bool operator==(const InputFailureMode&) const = default;
};

struct CftOutputFailureMode {
  std::string id;
  std::string port;
  std::string input;  ///< The node feeding this OFM.

  bool operator==(const CftOutputFailureMode&) const = default;
};

/// Component fault tree element: a DAG of basic events and gates
/// between input and output failure modes.
struct CftElement {
  std::vector<BasicEvent> events;
  std::vector<Gate> gates;
  std::vector<InputFailureMode> ifms;
  std::vector<CftOutputFailureMode> ofms;

  const BasicEvent* find_event(std::string_view id) const;
  const Gate* find_gate(std::string_view id) const;
  const InputFailureMode* find_ifm(std::string_view id) const;
  const CftOutputFailureMode* find_ofm(std::string_view id) const;

  bool operator==(const CftElement&) const = default;
};

struct Transition {
  std::string from;
  std::string to;
  Rate rate;  ///< Intrinsic rate before input failure modes are added.

  bool operator==(const Transition&) const = default;
};

struct CmcOutputFailureMode {
  std::string id;
  std::string port;

  bool operator==(const CmcOutputFailureMode&) const = default;
};

/// (ifm, transition): the IFM's rate is added onto the transition.
struct InputDependency {
  std::string ifm;
  std::string from;
  std::string to;

  bool operator==(const InputDependency&) const = default;
};

/// (error state, ofm): reaching the state triggers the OFM.
struct OutputDependency {
  std::string state;
  std::string ofm;

  bool operator==(const OutputDependency&) const = default;
};

/// Component Markov chain element:
/// (states, error states, initial state, transitions, IFM, DI, OFM, DO).
struct CmcElement {
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> error_states;
  std::vector<Transition> transitions;
  std::vector<InputFailureMode> ifms;
  std::vector<CmcOutputFailureMode> ofms;
  std::vector<InputDependency> input_deps;
  std::vector<OutputDependency> output_deps;

  bool has_state(std::string_view id) const;
  bool is_error_state(std::string_view id) const;
  const Transition* find_transition(std::string_view from,
                                    std::string_view to) const;
  const InputFailureMode* find_ifm(std::string_view id) const;
  const CmcOutputFailureMode* find_ofm(std::string_view id) const;

  /// DI(t): ids of the IFMs the transition depends on, in declaration order.
  std::vector<std::string> dependencies(const Transition& t) const;
  /// Error states bound to `ofm` through DO, in declaration order.
  std::vector<std::string> error_states_of(std::string_view ofm) const;

  bool operator==(const CmcElement&) const = default;
};

using FailureLogic = std::variant<CftElement, CmcElement>;

struct Component {
  std::string id;
  std::vector<std::string> inports;
  std::vector<std::string> outports;
  FailureLogic flm;

  bool is_cft() const { return std::holds_alternative<CftElement>(flm); }
  bool is_cmc() const { return std::holds_alternative<CmcElement>(flm); }
  const CftElement& cft() const { return std::get<CftElement>(flm); }
  const CmcElement& cmc() const { return std::get<CmcElement>(flm); }

  bool has_inport(std::string_view port) const;
  bool has_outport(std::string_view port) const;

  /// Ids of all output failure modes bound to `outport`, declaration order.
  std::vector<std::string> ofms_on(std::string_view outport) const;
  /// All input failure modes regardless of element kind.
  const std::vector<InputFailureMode>& ifms() const;
  /// Ids of all output failure modes regardless of element kind.
  std::vector<std::string> ofm_ids() const;

  bool operator==(const Component&) const = default;
};

struct SystemModel {
  std::vector<Component> components;
  std::vector<Connection> connections;

  const Component* find(std::string_view id) const;
  /// The connection whose target is `inport`, if any.
  const Connection* connection_into(const PortRef& inport) const;

  /// Upstream output failure modes an IFM of `component` receives.
  /// Empty when the inport is unconnected or the source carries no
  /// matching failure mode.
  std::vector<FailureModeRef> resolve_input(
      const Component& component, const InputFailureMode& ifm) const;

  bool operator==(const SystemModel&) const = default;
};

/// Canonical form: components, ports and connections sorted.
/// Element contents keep declaration order, which carries meaning
/// (state indexing).
SystemModel canonical(SystemModel model);

/// Equality up to the ordering of components, ports and connections.
bool structurally_equal(const SystemModel& lhs, const SystemModel& rhs);

}  // namespace ghcft
