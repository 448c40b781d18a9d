#include "ghcft/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ghcft/rate.h"

namespace ghcft {

namespace {

std::string Printf(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

std::string Exact(double value) { return Printf("%.16e", value); }

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string JoinSet(const CutSet& set) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ", ";
    out += set[i];
  }
  return out;
}

/// Lines of the "Cut sets" column for one result.
std::vector<std::string> CutSetCell(const CutSetResult& result) {
  std::vector<std::string> lines;
  if (result.cut_sets.empty()) lines.push_back("(none)");
  for (std::size_t i = 0; i < result.cut_sets.size(); ++i) {
    const CutSet& set = result.cut_sets[i];
    lines.push_back("(" + std::to_string(i + 1) + ") " +
                    (set.empty() ? std::string("(always)") : JoinSet(set)));
  }
  return lines;
}

/// Renders rows whose cells may span several lines.
std::string Table(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::vector<std::string>>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      for (const auto& line : row[c]) width[c] = std::max(width[c], line.size());

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) line += " | ";
      std::string cell = cells[c];
      if (c + 1 < cells.size()) cell.resize(width[c], ' ');
      line += cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  };
  emit(header);
  std::string rule;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) rule += "-+-";
    rule += std::string(width[c], '-');
  }
  out << rule << "\n";
  for (const auto& row : rows) {
    std::size_t height = 1;
    for (const auto& cell : row) height = std::max(height, cell.size());
    for (std::size_t l = 0; l < height; ++l) {
      std::vector<std::string> cells;
      for (const auto& cell : row) cells.push_back(l < cell.size() ? cell[l] : "");
      emit(cells);
    }
  }
  return out.str();
}

std::string Mtbf(double per_hour) {
  double mtbf = mtbf_hours(per_hour);
  return std::isfinite(mtbf) ? Printf("%.6g", mtbf) : "inf";
}

}  // namespace

std::string_view unit_label(ReportUnits units) {
  return units == ReportUnits::kFit ? "FIT" : "1/h";
}

std::string display_rate(double per_hour, ReportUnits units) {
  double value = units == ReportUnits::kFit ? per_hour * kFitPerHour : per_hour;
  return Printf("%.6g", value);
}

std::string cut_set_table(const std::vector<CutSetResult>& results) {
  std::vector<std::vector<std::vector<std::string>>> rows;
  for (const auto& r : results) rows.push_back({{r.top}, CutSetCell(r)});
  return Table({"Top event", "Cut sets"}, rows);
}

std::string rate_table(const std::vector<RateRow>& rows, ReportUnits units) {
  std::vector<std::vector<std::vector<std::string>>> cells;
  for (const auto& row : rows)
    cells.push_back({{row.rate.top.str()},
                     CutSetCell(row.cut_sets),
                     {display_rate(row.rate.rate, units)},
                     {Mtbf(row.rate.rate)}});
  std::string out = Table({"Top event", "Cut sets",
                           "Failure rate [" + std::string(unit_label(units)) + "]",
                           "MTBF [h]"},
                          cells);
  for (const auto& row : rows) {
    out += "\nFailure modes contributing to " + row.rate.top.str() + ":\n";
    const bool fit = units == ReportUnits::kFit;
    std::vector<std::vector<std::vector<std::string>>> modes;
    for (const auto& m : row.rate.modes) {
      std::vector<std::vector<std::string>> line{{m.mode.str()},
                                                 {Printf("%.6e", m.rate)}};
      if (fit) line.push_back({display_rate(m.rate, units)});
      line.push_back({std::string(to_string(m.method))});
      modes.push_back(std::move(line));
    }
    std::vector<std::string> header{"Failure mode", "Rate [1/h]"};
    if (fit) header.push_back("Rate [FIT]");
    header.push_back("Method");
    out += Table(header, modes);
    for (const auto& d : row.rate.diagnostics) out += "note: " + d + "\n";
  }
  return out;
}

std::string validation_text(const ValidationReport& report) {
  if (report.empty()) return "model is valid\n";
  std::ostringstream out;
  for (const auto& f : report.findings) {
    out << to_string(f.severity) << " [" << f.code << "]";
    if (!f.component.empty()) {
      out << " " << f.component;
      if (!f.location.empty()) out << " (" << f.location << ")";
    }
    out << ": " << f.message << "\n";
  }
  out << report.error_count() << " error(s), "
      << report.findings.size() - report.error_count() << " warning(s)\n";
  return out.str();
}

std::string simulation_text(const std::string& component,
                            const std::string& target,
                            const SimulationEstimate& e, ReportUnits units) {
  std::ostringstream out;
  std::string unit(unit_label(units));
  out << "component            " << component << "\n"
      << "target state         " << target << "\n"
      << "runs                 " << e.runs << "\n"
      << "hits                 " << e.hits << "\n"
      << "censored             " << e.censored << "\n"
      << "seed                 " << e.seed << "\n"
      << "horizon [h]          " << Printf("%.6g", e.horizon) << "\n"
      << "mean first passage   " << Printf("%.6g", e.mean_first_passage) << " h\n"
      << "rate estimate        " << display_rate(e.rate_estimate, units) << " "
      << unit << "\n"
      << "standard error       " << display_rate(e.std_error, units) << " " << unit
      << "\n";
  for (const auto& d : e.diagnostics) out << "note: " << d << "\n";
  return out.str();
}

void MachineReport::run_metadata(const std::string& key, const std::string& value) {
  run_.emplace_back(key, value);
}

std::string MachineReport::number(double per_hour) const {
  if (units_ == ReportUnits::kFit) return Exact(per_hour * kFitPerHour) + " FIT";
  return Exact(per_hour) + " /h";
}

void MachineReport::add(const ValidationReport& report) {
  std::ostringstream out;
  out << "\nvalidation {\n";
  out << "  errors " << report.error_count() << "\n";
  out << "  warnings " << report.findings.size() - report.error_count() << "\n";
  for (const auto& f : report.findings)
    out << "  finding " << to_string(f.severity) << " " << f.code << " "
        << Quote(f.component) << " " << Quote(f.location) << " "
        << Quote(f.message) << "\n";
  out << "}\n";
  body_ += out.str();
}

void MachineReport::add(const CutSetResult& result) {
  std::ostringstream out;
  out << "\nmcs {\n  top " << result.top << "\n  count " << result.cut_sets.size()
      << "\n";
  for (const auto& set : result.cut_sets) {
    out << "  set";
    for (const auto& e : set) out << " " << e;
    out << "\n";
  }
  out << "}\n";
  body_ += out.str();
}

void MachineReport::add(const RateResult& result) {
  std::ostringstream out;
  out << "\nrate {\n  top " << result.top.str() << "\n  method "
      << to_string(result.method) << "\n  rate " << number(result.rate)
      << "\n  mtbf " << Exact(result.mtbf) << " h\n";
  for (const auto& m : result.modes) {
    out << "  mode " << m.mode.str() << " " << to_string(m.method) << " "
        << number(m.rate) << "\n";
    for (const auto& d : m.diagnostics)
      out << "  diagnostic " << m.mode.str() << " " << Quote(d) << "\n";
  }
  out << "}\n";
  body_ += out.str();
}

void MachineReport::add_simulation(const std::string& component,
                                   const std::string& target,
                                   const SimulationEstimate& e) {
  std::ostringstream out;
  out << "\nsimulate {\n  component " << component << "\n  target " << target
      << "\n  seed " << e.seed << "\n  runs " << e.runs << "\n  hits " << e.hits
      << "\n  censored " << e.censored << "\n  horizon " << Exact(e.horizon)
      << " h\n  mean-first-passage " << Exact(e.mean_first_passage)
      << " h\n  rate " << number(e.rate_estimate) << "\n  std-error "
      << number(e.std_error) << "\n";
  for (const auto& d : e.diagnostics) out << "  diagnostic " << Quote(d) << "\n";
  out << "}\n";
  body_ += out.str();
}

std::string MachineReport::str() const {
  std::string out = "ghcft-report " + std::string(kReportVersion) + "\n";
  if (!run_.empty()) {
    out += "\nrun {\n";
    for (const auto& [k, v] : run_) out += "  " + k + " " + Quote(v) + "\n";
    out += "}\n";
  }
  return out + body_;
}

}  // namespace ghcft
