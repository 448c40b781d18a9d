/// @file format.h
/// The `.ghcft` text format. See docs/format.md for the grammar.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "ghcft/model.h"

namespace ghcft {

inline constexpr std::string_view kFormatVersion = "1.0";

struct ModelDocument {
  std::string format_version{kFormatVersion};
  std::map<std::string, std::string> metadata;
  SystemModel system;

  bool operator==(const ModelDocument&) const = default;
};

/// Equality up to ordering of components, ports and connections.
bool structurally_equal(const ModelDocument& lhs, const ModelDocument& rhs);

/// Parses a document. Only syntax and identifier uniqueness are checked;
/// references are left to `validate_model`.
/// @throws ParseError  With 1-based line and column.
ModelDocument parse_model(std::string_view text);

/// @throws Error  The file cannot be read.
/// @throws ParseError
ModelDocument read_model_file(const std::filesystem::path& path);

enum class RateDisplay {
  kAsWritten,  ///< Each rate in the unit it was created with.
  kPerHour,
  kFit,
};

struct SerializeOptions {
  RateDisplay rates = RateDisplay::kAsWritten;
};

/// Canonical text: components and ports sorted, fixed field order,
/// per-hour rates in scientific notation with 17 significant digits,
/// FIT rates in shortest round-trip decimal.
std::string serialize_model(const ModelDocument& doc,
                            const SerializeOptions& options = {});

/// `<value> /h` or `<value> FIT` as it would appear in a document.
std::string format_rate(const Rate& rate, RateDisplay display);

/// Shortest decimal that reads back to exactly `value`.
std::string shortest_decimal(double value);

}  // namespace ghcft
