/// @file validate.h
/// Well-formedness checks and structural queries over system models.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ghcft/model.h"

namespace ghcft {

enum class Severity { kError, kWarning };

std::string_view to_string(Severity severity);

struct Finding {
  Severity severity = Severity::kError;
  std::string code;       ///< Stable kebab-case identifier, e.g. "self-loop".
  std::string message;
  std::string component;  ///< Owning component id; empty for model-level.
  std::string location;   ///< Element inside the component, if any.

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool empty() const { return findings.empty(); }
  /// No error-severity findings.
  bool ok() const;
  std::size_t error_count() const;
};

/// Checks every structural invariant of the model.
/// Findings are ordered by component id, then code.
ValidationReport validate_model(const SystemModel& model);

/// Input failure mode rates keyed by IFM id, per hour.
using IfmRates = std::map<std::string, double, std::less<>>;

/// Base rate of `transition` plus the rates of every IFM it depends on.
/// @throws UnresolvedInputError  A dependent IFM has no entry in `ifm_rates`.
double effective_rate(const CmcElement& cmc, const Transition& transition,
                      const IfmRates& ifm_rates);

/// Component ids such that every producer precedes its consumers.
/// Ties are broken by component id.
/// @throws CyclicDependencyError  The connection graph has a cycle.
std::vector<std::string> topological_order(const SystemModel& model);

/// A basic event whose influence on the top event is not captured by a
/// single CMC inport.
struct SharedEventDiagnostic {
  std::string event;                ///< Qualified `component.event`.
  std::vector<std::string> routes;  ///< Sorted entry points, "direct" for CFT-only routes.
  std::string message;

  bool operator==(const SharedEventDiagnostic&) const = default;
};

/// Basic events whose failure influence reaches `top` through more than one
/// CMC inport, or through a CMC inport and a route that bypasses it.
/// Repeated events in pure fault-tree routes are not reported.
/// @throws LookupError  `top` does not name an output failure mode.
std::vector<SharedEventDiagnostic> detect_shared_events(
    const SystemModel& model, const FailureModeRef& top);

}  // namespace ghcft
