#include "addcoal/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "addcoal/core.hpp"

namespace addcoal {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> numbered_columns(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw InvalidArgument("Table: need at least one column");
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() > columns_.size()) throw InvalidArgument("Table: row wider than header");
  for (const auto& cell : row) {
    if (const double* x = std::get_if<double>(&cell); x != nullptr && !std::isfinite(*x)) {
      throw NumericalError("Table: non-finite value in output");
    }
  }
  row.resize(columns_.size());
  rows_.push_back(std::move(row));
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvCell {
  std::string operator()(std::monostate) const { return {}; }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(double v) const { return format_real(v); }
  std::string operator()(const std::string& v) const { return csv_escape(v); }
};

}  // namespace

void Table::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << csv_escape(columns_[c]);
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << std::visit(CsvCell{}, row[c]);
    os << '\n';
  }
}

void Table::write_json(std::ostream& os) const {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              obj[columns_[c]] = nullptr;
            } else {
              obj[columns_[c]] = v;
            }
          },
          row[c]);
    }
    rows.push_back(std::move(obj));
  }
  os << rows.dump(2) << '\n';
}

void Table::write(std::ostream& os, OutputFormat format) const {
  if (format == OutputFormat::csv) {
    write_csv(os);
  } else {
    write_json(os);
  }
}

}  // namespace addcoal
