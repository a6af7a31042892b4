#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace wmamp::cli {

/// 17 significant digits ("%.17g"): round-trips every binary64 value.
std::string format_number(double value);

/// Serializes `doc` with 2-space indentation; floating-point values use
/// format_number, non-finite values become null.
void write_json(std::ostream& out, const nlohmann::ordered_json& doc);

/// Comma-delimited, '\n'-terminated row. Fields are written verbatim.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Two-column "key  value" listing with aligned values.
void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows);

/// Whitespace-aligned table with a header row.
void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

} // namespace wmamp::cli
