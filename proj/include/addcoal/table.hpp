#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace addcoal {

enum class OutputFormat { csv, json };

/// Rectangular result set written as CSV (17 significant digits, empty
/// cells for missing values) or as a JSON array of row objects.
class Table {
 public:
  using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<Cell>& row(std::size_t i) const { return rows_[i]; }

  /// Short rows are padded with empty cells. Throws on non-finite reals.
  void add_row(std::vector<Cell> row);

  void write(std::ostream& os, OutputFormat format) const;
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// "%.17g"
std::string format_real(double x);

/// prefix1, prefix2, ..., prefixK
std::vector<std::string> numbered_columns(const std::string& prefix, std::size_t count);

}  // namespace addcoal
