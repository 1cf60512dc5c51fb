#include "fgvi/cli/table_writer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fgvi::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string quoted = "\"";
  for (char ch : field) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

TableWriter::TableWriter(std::ostream& out, OutputFormat format) : out_(out), format_(format) {}

void TableWriter::metadata(const nlohmann::json& record) {
  if (format_ == OutputFormat::csv) {
    out_ << "# metadata: " << record.dump() << '\n';
  } else {
    nlohmann::json line = {{"record", "metadata"}};
    line.update(record);
    out_ << line.dump() << '\n';
  }
}

void TableWriter::begin_table(const std::string& name, std::vector<std::string> columns) {
  table_ = name;
  columns_ = std::move(columns);
  if (format_ == OutputFormat::csv) {
    out_ << "# table: " << name << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << csv_escape(columns_[i]);
    }
    out_ << '\n';
  } else {
    nlohmann::json header = {{"record", "header"}, {"table", name}, {"columns", columns_}};
    out_ << header.dump() << '\n';
  }
}

std::string TableWriter::render_csv(const Cell& cell) const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return csv_escape(v);
      },
      cell);
}

std::string TableWriter::render_json(const Cell& cell) const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? format_double(v) : "null";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return nlohmann::json(v).dump();
        }
      },
      cell);
}

void TableWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_.size()) {
    throw std::logic_error("row width " + std::to_string(cells.size()) + " does not match table " +
                           table_ + " with " + std::to_string(columns_.size()) + " columns");
  }
  if (format_ == OutputFormat::csv) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << render_csv(cells[i]);
    }
  } else {
    out_ << "{\"table\":" << nlohmann::json(table_).dump();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out_ << ',' << nlohmann::json(columns_[i]).dump() << ':' << render_json(cells[i]);
    }
    out_ << '}';
  }
  out_ << '\n';
}

}  // namespace fgvi::cli
