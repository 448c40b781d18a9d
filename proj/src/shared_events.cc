#include <map>
#include <set>

#include "ghcft/error.h"
#include "ghcft/qualitative.h"
#include "ghcft/validate.h"

namespace ghcft {

namespace {

constexpr const char* kDirect = "direct";

/// Walks from the top event towards the leaves, remembering the most
/// recently crossed CMC inport. For a basic event, that is the first CMC
/// inport its influence enters on the way up to the top.
class RouteCollector {
 public:
  explicit RouteCollector(const SystemModel& model) : model_(model) {
    for (const auto& component : model.components) {
      elements_.emplace(component.id, component.is_cft()
                                          ? component.cft()
                                          : cmc_to_cft(component.cmc()));
    }
  }

  std::map<std::string, std::set<std::string>> Run(const FailureModeRef& top) {
    const Component* component = model_.find(top.component);
    if (!component)
      throw LookupError("unknown component '" + top.component + "'");
    const CftOutputFailureMode* ofm =
        elements_.at(component->id).find_ofm(top.mode);
    if (!ofm)
      throw LookupError("'" + top.str() + "' is not an output failure mode");
    Visit(*component, ofm->input, kDirect);
    return std::move(routes_);
  }

 private:
  void Visit(const Component& component, const std::string& local,
             const std::string& entry) {
    if (!visited_.insert(component.id + "." + local + "\n" + entry).second)
      return;
    const CftElement& cft = elements_.at(component.id);
    if (cft.find_event(local)) {
      if (component.is_cft())
        routes_[component.id + "." + local].insert(entry);
      return;
    }
    if (const Gate* gate = cft.find_gate(local)) {
      for (const auto& input : gate->inputs) Visit(component, input, entry);
      return;
    }
    if (const InputFailureMode* ifm = cft.find_ifm(local)) {
      std::string next =
          component.is_cmc() ? component.id + "." + ifm->port : entry;
      for (const auto& source : model_.resolve_input(component, *ifm)) {
        const Component& upstream = *model_.find(source.component);
        const CftOutputFailureMode* ofm =
            elements_.at(upstream.id).find_ofm(source.mode);
        Visit(upstream, ofm->input, next);
      }
    }
  }

  const SystemModel& model_;
  std::map<std::string, CftElement> elements_;
  std::set<std::string> visited_;
  std::map<std::string, std::set<std::string>> routes_;
};

}  // namespace

std::vector<SharedEventDiagnostic> detect_shared_events(
    const SystemModel& model, const FailureModeRef& top) {
  std::vector<SharedEventDiagnostic> result;
  for (const auto& [event, entries] : RouteCollector(model).Run(top)) {
    bool enters_cmc = entries.size() > (entries.count(kDirect) ? 1u : 0u);
    if (!enters_cmc || entries.size() < 2) continue;
    SharedEventDiagnostic diagnostic{
        event, {entries.begin(), entries.end()}, ""};
    std::string list;
    for (const auto& e : diagnostic.routes) list += (list.empty() ? "" : ", ") + e;
    diagnostic.message =
        "basic event '" + event + "' reaches '" + top.str() +
        "' through several routes (" + list +
        "); a repeated event may only enter one CMC inport, and that inport "
        "must capture its whole influence on the top event";
    result.push_back(std::move(diagnostic));
  }
  return result;
}

}  // namespace ghcft
