#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fgvi/cli/run_config.hpp"

namespace fgvi::cli {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

/// Shortest-free "%.17g" rendering; non-finite values become nan/inf/-inf.
std::string format_double(double value);

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Writes a metadata record followed by named tables.
///
/// CSV: "# metadata: {json}" first, then for each table "# table: name", a
/// header row and the data rows. JSON-lines: one object per line, the first
/// carrying "record": "metadata", then per table a header record and one
/// object per row keyed by column name. Non-finite numbers are null in JSON.
class TableWriter {
 public:
  TableWriter(std::ostream& out, OutputFormat format);

  void metadata(const nlohmann::json& record);
  void begin_table(const std::string& name, std::vector<std::string> columns);
  /// Throws std::logic_error when the width does not match the header.
  void row(const std::vector<Cell>& cells);

 private:
  std::string render_csv(const Cell& cell) const;
  std::string render_json(const Cell& cell) const;

  std::ostream& out_;
  OutputFormat format_;
  std::string table_;
  std::vector<std::string> columns_;
};

}  // namespace fgvi::cli
