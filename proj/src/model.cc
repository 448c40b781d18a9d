#include "ghcft/model.h"

#include <algorithm>

#include "ghcft/error.h"

namespace ghcft {

namespace {

template <class T>
const T* FindById(const std::vector<T>& items, std::string_view id) {
  auto it = std::find_if(items.begin(), items.end(),
                         [id](const T& item) { return item.id == id; });
  return it == items.end() ? nullptr : &*it;
}

}  // namespace

FailureModeRef FailureModeRef::Parse(std::string_view text) {
  auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size())
    throw LookupError("expected 'component.failure_mode', got '" +
                      std::string(text) + "'");
  return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

std::string_view to_string(GateKind kind) {
  return kind == GateKind::kAnd ? "and" : "or";
}

const BasicEvent* CftElement::find_event(std::string_view id) const {
  return FindById(events, id);
}
const Gate* CftElement::find_gate(std::string_view id) const {
  return FindById(gates, id);
}
const InputFailureMode* CftElement::find_ifm(std::string_view id) const {
  return FindById(ifms, id);
}
const CftOutputFailureMode* CftElement::find_ofm(std::string_view id) const {
  return FindById(ofms, id);
}

bool CmcElement::has_state(std::string_view id) const {
  return std::find(states.begin(), states.end(), id) != states.end();
}

bool CmcElement::is_error_state(std::string_view id) const {
  return std::find(error_states.begin(), error_states.end(), id) !=
         error_states.end();
}

const Transition* CmcElement::find_transition(std::string_view from,
                                              std::string_view to) const {
  auto it = std::find_if(
      transitions.begin(), transitions.end(),
      [&](const Transition& t) { return t.from == from && t.to == to; });
  return it == transitions.end() ? nullptr : &*it;
}

const InputFailureMode* CmcElement::find_ifm(std::string_view id) const {
  return FindById(ifms, id);
}

const CmcOutputFailureMode* CmcElement::find_ofm(std::string_view id) const {
  return FindById(ofms, id);
}

std::vector<std::string> CmcElement::dependencies(const Transition& t) const {
  std::vector<std::string> result;
  for (const auto& dep : input_deps) {
    if (dep.from == t.from && dep.to == t.to &&
        std::find(result.begin(), result.end(), dep.ifm) == result.end())
      result.push_back(dep.ifm);
  }
  return result;
}

std::vector<std::string> CmcElement::error_states_of(
    std::string_view ofm) const {
  std::vector<std::string> result;
  for (const auto& dep : output_deps) {
    if (dep.ofm == ofm &&
        std::find(result.begin(), result.end(), dep.state) == result.end())
      result.push_back(dep.state);
  }
  return result;
}

bool Component::has_inport(std::string_view port) const {
  return std::find(inports.begin(), inports.end(), port) != inports.end();
}

bool Component::has_outport(std::string_view port) const {
  return std::find(outports.begin(), outports.end(), port) != outports.end();
}

std::vector<std::string> Component::ofms_on(std::string_view outport) const {
  std::vector<std::string> result;
  std::visit(
      [&](const auto& element) {
        for (const auto& ofm : element.ofms)
          if (ofm.port == outport) result.push_back(ofm.id);
      },
      flm);
  return result;
}

const std::vector<InputFailureMode>& Component::ifms() const {
  return std::visit(
      [](const auto& element) -> const std::vector<InputFailureMode>& {
        return element.ifms;
      },
      flm);
}

std::vector<std::string> Component::ofm_ids() const {
  std::vector<std::string> result;
  std::visit(
      [&](const auto& element) {
        for (const auto& ofm : element.ofms) result.push_back(ofm.id);
      },
      flm);
  return result;
}

const Component* SystemModel::find(std::string_view id) const {
  return FindById(components, id);
}

const Connection* SystemModel::connection_into(const PortRef& inport) const {
  auto it = std::find_if(connections.begin(), connections.end(),
                         [&](const Connection& c) { return c.to == inport; });
  return it == connections.end() ? nullptr : &*it;
}

std::vector<FailureModeRef> SystemModel::resolve_input(
    const Component& component, const InputFailureMode& ifm) const {
  std::vector<FailureModeRef> result;
  const Connection* connection = connection_into({component.id, ifm.port});
  if (!connection) return result;
  const Component* source = find(connection->from.component);
  if (!source) return result;
  for (const auto& mode : source->ofms_on(connection->from.port)) {
    if (ifm.mode.empty() || ifm.mode == mode)
      result.push_back({source->id, mode});
  }
  return result;
}

SystemModel canonical(SystemModel model) {
  for (auto& component : model.components) {
    std::sort(component.inports.begin(), component.inports.end());
    std::sort(component.outports.begin(), component.outports.end());
  }
  std::sort(model.components.begin(), model.components.end(),
            [](const Component& a, const Component& b) { return a.id < b.id; });
  std::sort(model.connections.begin(), model.connections.end());
  return model;
}

bool structurally_equal(const SystemModel& lhs, const SystemModel& rhs) {
  return canonical(lhs) == canonical(rhs);
}

}  // namespace ghcft
