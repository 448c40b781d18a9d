/// @file report.h
/// Text tables and the machine-readable `ghcft-report` format.
///
/// A machine report is a header line followed by keyword blocks in the
/// same style as model files:
///
///     ghcft-report 1.0
///
///     run {
///       command "rate"
///       model "models/fig5.ghcft"
///     }
///
///     rate {
///       top c3.c
///       ...
///     }
///
/// The `run` block carries invocation metadata only. Payload blocks never
/// contain timestamps or host information, so reports are stable under
/// re-invocation.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ghcft/format.h"
#include "ghcft/oracle.h"
#include "ghcft/qualitative.h"
#include "ghcft/quantitative.h"
#include "ghcft/validate.h"

namespace ghcft {

inline constexpr std::string_view kReportVersion = "1.0";

/// Display unit for rates in reports.
enum class ReportUnits { kFit, kPerHour };

/// Two columns: top event and numbered cut sets, one set per line.
std::string cut_set_table(const std::vector<CutSetResult>& results);

struct RateRow {
  CutSetResult cut_sets;
  RateResult rate;
};

/// Top event, cut sets, failure rate and MTBF, followed by a per-mode
/// breakdown with the method used for each output failure mode.
std::string rate_table(const std::vector<RateRow>& rows, ReportUnits units);

std::string validation_text(const ValidationReport& report);

std::string simulation_text(const std::string& component,
                            const std::string& target,
                            const SimulationEstimate& estimate,
                            ReportUnits units);

/// Rate value in the display unit, `%.6g` style.
std::string display_rate(double per_hour, ReportUnits units);
std::string_view unit_label(ReportUnits units);

/// Builder for `ghcft-report` documents. Blocks appear in insertion order.
class MachineReport {
 public:
  explicit MachineReport(ReportUnits units) : units_(units) {}

  void run_metadata(const std::string& key, const std::string& value);
  void add(const ValidationReport& report);
  void add(const CutSetResult& result);
  void add(const RateResult& result);
  void add_simulation(const std::string& component, const std::string& target,
                      const SimulationEstimate& estimate);

  std::string str() const;

 private:
  std::string number(double per_hour) const;

  ReportUnits units_;
  std::vector<std::pair<std::string, std::string>> run_;
  std::string body_;
};

}  // namespace ghcft
