#include "cli.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ghcft/error.h"
#include "ghcft/format.h"
#include "ghcft/oracle.h"
#include "ghcft/qualitative.h"
#include "ghcft/quantitative.h"
#include "ghcft/report.h"
#include "ghcft/validate.h"

namespace ghcft {

namespace {

/// Raised for invocation problems detected after flag parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Invocation {
  std::string model_path;
  std::vector<std::string> tops;
  std::string output = "text";
  std::string units = "fit";

  // solver
  SolverConfig solver;
  std::optional<double> mission_time;
  bool transient = false;

  // qualitative
  std::size_t max_cut_sets = McsOptions{}.max_sets;
  bool strict = false;

  // transform
  std::string component;
  std::string out_path;

  // simulate
  std::string target;
  SimulationOptions simulation;
};

double EnvTolerance(const char* name, double fallback) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return fallback;
  char* end = nullptr;
  double parsed = std::strtod(value, &end);
  if (*end != '\0' || !(parsed > 0))
    throw UsageError(std::string("environment variable ") + name +
                     " must be a positive number, got '" + value + "'");
  return parsed;
}

ReportUnits Units(const Invocation& inv) {
  return inv.units == "perhour" ? ReportUnits::kPerHour : ReportUnits::kFit;
}

ModelDocument Load(const Invocation& inv) {
  std::ifstream probe(inv.model_path);
  if (!probe) throw UsageError("cannot read model file '" + inv.model_path + "'");
  return read_model_file(inv.model_path);
}

/// Parses and validates; prints findings to `err` when the model is invalid.
std::optional<ModelDocument> LoadValid(const Invocation& inv, std::ostream& err) {
  ModelDocument doc = Load(inv);
  ValidationReport report = validate_model(doc.system);
  if (!report.ok()) {
    err << inv.model_path << ": model is invalid\n" << validation_text(report);
    return std::nullopt;
  }
  for (const auto& f : report.findings)
    err << "warning [" << f.code << "] " << f.component << ": " << f.message << "\n";
  return doc;
}

std::vector<FailureModeRef> Tops(const Invocation& inv) {
  std::vector<FailureModeRef> tops;
  for (const auto& t : inv.tops) {
    if (t.find('.') == std::string::npos)
      throw UsageError("--top expects 'component.failure_mode', got '" + t + "'");
    tops.push_back(FailureModeRef::Parse(t));
  }
  return tops;
}

MachineReport NewReport(const Invocation& inv, const std::string& command) {
  MachineReport report(Units(inv));
  report.run_metadata("command", command);
  report.run_metadata("model", inv.model_path);
  report.run_metadata("units", inv.units);
  return report;
}

int Validate(const Invocation& inv, std::ostream& out) {
  ModelDocument doc = Load(inv);
  ValidationReport report = validate_model(doc.system);
  if (inv.output == "machine") {
    MachineReport machine = NewReport(inv, "validate");
    machine.add(report);
    out << machine.str();
  } else {
    out << validation_text(report);
  }
  return report.ok() ? kExitOk : kExitAnalysisError;
}

int Mcs(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto doc = LoadValid(inv, err);
  if (!doc) return kExitAnalysisError;
  std::vector<CutSetResult> results;
  for (const auto& top : Tops(inv)) {
    FlattenedTree tree = flatten_ghcft(doc->system, top, {inv.strict});
    results.push_back(minimal_cut_sets(tree, {inv.max_cut_sets}));
  }
  if (inv.output == "machine") {
    MachineReport machine = NewReport(inv, "mcs");
    for (const auto& r : results) machine.add(r);
    out << machine.str();
  } else {
    out << cut_set_table(results);
  }
  return kExitOk;
}

int RateCommand(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto doc = LoadValid(inv, err);
  if (!doc) return kExitAnalysisError;
  SolverConfig cfg = inv.solver;
  cfg.mission_time = inv.mission_time;
  cfg.transient_rates = inv.transient;
  cfg.check();
  std::vector<RateRow> rows;
  for (const auto& top : Tops(inv)) {
    FlattenedTree tree = flatten_ghcft(doc->system, top, {inv.strict});
    RateRow row{minimal_cut_sets(tree, {inv.max_cut_sets}),
                evaluate_ghcft(doc->system, top, cfg)};
    rows.push_back(std::move(row));
  }
  if (inv.output == "machine") {
    MachineReport machine = NewReport(inv, "rate");
    for (const auto& row : rows) {
      machine.add(row.cut_sets);
      machine.add(row.rate);
    }
    out << machine.str();
  } else {
    out << rate_table(rows, Units(inv));
  }
  return kExitOk;
}

int Transform(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto doc = LoadValid(inv, err);
  if (!doc) return kExitAnalysisError;
  Component* target = nullptr;
  for (auto& c : doc->system.components)
    if (c.id == inv.component) target = &c;
  if (target == nullptr)
    throw LookupError("no component '" + inv.component + "'");
  if (!target->is_cmc())
    throw DomainError("component '" + inv.component +
                      "' is already a component fault tree");
  std::vector<std::string> warnings;
  target->flm = cmc_to_cft(target->cmc(), &warnings);
  for (const auto& w : warnings) err << "warning: " << inv.component << ": " << w << "\n";

  std::string text = serialize_model(*doc);
  if (inv.out_path.empty() || inv.out_path == "-") {
    out << text;
  } else {
    std::ofstream file(inv.out_path, std::ios::binary);
    if (!file) throw UsageError("cannot write '" + inv.out_path + "'");
    file << text;
    if (!file.flush()) throw Error("failed writing '" + inv.out_path + "'");
  }
  return kExitOk;
}

int Simulate(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto doc = LoadValid(inv, err);
  if (!doc) return kExitAnalysisError;
  const Component* component = doc->system.find(inv.component);
  if (component == nullptr)
    throw LookupError("no component '" + inv.component + "'");
  if (!component->is_cmc())
    throw DomainError("component '" + inv.component + "' is not a Markov chain");
  SolverConfig cfg = inv.solver;
  cfg.mission_time = inv.mission_time;
  IfmRates rates = component_input_rates(doc->system, inv.component, cfg);
  SimulationEstimate estimate =
      simulate_first_passage(component->cmc(), rates, inv.target, inv.simulation);
  if (inv.output == "machine") {
    MachineReport machine = NewReport(inv, "simulate");
    machine.add_simulation(inv.component, inv.target, estimate);
    out << machine.str();
  } else {
    out << simulation_text(inv.component, inv.target, estimate, Units(inv));
  }
  return kExitOk;
}

void AddCommon(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("model", inv.model_path, "Model file (.ghcft)")->required();
  cmd->add_option("--output", inv.output, "Report style")
      ->check(CLI::IsMember({"text", "machine"}))
      ->capture_default_str();
  cmd->add_option("--units", inv.units, "Rate display unit")
      ->check(CLI::IsMember({"fit", "perhour"}))
      ->capture_default_str();
}

void AddQualitative(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--top", inv.tops, "Top event 'component.ofm' (repeatable)")
      ->required();
  cmd->add_option("--max-cut-sets", inv.max_cut_sets,
                  "Cap on intermediate cut sets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--strict", inv.strict,
                "Reject unconnected input failure modes instead of pruning them");
}

void AddSolver(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--mission-time", inv.mission_time,
                  "Mission time in hours; required for AND gates")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rtol", inv.solver.rel_tol, "Relative tolerance (env GHCFT_RTOL)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--atol", inv.solver.abs_tol, "Absolute tolerance (env GHCFT_ATOL)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-steps", inv.solver.max_steps, "Transient solver step cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  Invocation inv;
  try {
    inv.solver.rel_tol = EnvTolerance("GHCFT_RTOL", inv.solver.rel_tol);
    inv.solver.abs_tol = EnvTolerance("GHCFT_ATOL", inv.solver.abs_tol);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  }

  CLI::App app{"Analysis of generalized hybrid component fault trees", "ghcft"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ghcft 1.0");

  auto* validate = app.add_subcommand("validate", "Check a model for structural errors");
  AddCommon(validate, inv);

  auto* mcs = app.add_subcommand("mcs", "Minimal cut sets of top events");
  AddCommon(mcs, inv);
  AddQualitative(mcs, inv);

  auto* rate = app.add_subcommand("rate", "Failure rates and MTBF of top events");
  AddCommon(rate, inv);
  AddQualitative(rate, inv);
  AddSolver(rate, inv);
  rate->add_flag("--transient", inv.transient,
                 "Quantify Markov chains by transient integration over the mission time");

  auto* transform = app.add_subcommand(
      "transform", "Replace a Markov chain component by its fault tree");
  transform->add_option("model", inv.model_path, "Model file (.ghcft)")->required();
  transform->add_option("--component", inv.component, "Component to transform")
      ->required();
  transform->add_option("-o,--out", inv.out_path, "Output file (default: stdout)");

  auto* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo estimate of the first-passage rate to a state");
  AddCommon(simulate, inv);
  AddSolver(simulate, inv);
  simulate->add_option("--component", inv.component, "Markov chain component")
      ->required();
  simulate->add_option("--target", inv.target, "Target state")->required();
  simulate->add_option("--runs", inv.simulation.runs, "Number of runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", inv.simulation.seed, "64-bit seed")
      ->capture_default_str();
  simulate->add_option("--horizon", inv.simulation.horizon,
                       "Censoring time in hours (default: 100 / smallest nonzero rate)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--workers", inv.simulation.workers, "Worker threads")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (*validate) return Validate(inv, out);
    if (*mcs) return Mcs(inv, out, err);
    if (*rate) return RateCommand(inv, out, err);
    if (*transform) return Transform(inv, out, err);
    if (*simulate) return Simulate(inv, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const ParseError& e) {
    err << inv.model_path << ":" << e.what() << "\n";
    return kExitUsageError;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitAnalysisError;
  }
  return kExitUsageError;
}

}  // namespace ghcft
