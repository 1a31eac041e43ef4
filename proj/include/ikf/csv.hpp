#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ikf/dataset.hpp"

namespace ikf {

/// Column selector: header name or 0-based index (negative counts from the end).
using ColumnRef = std::variant<std::string, int>;

struct CsvSchema {
  std::filesystem::path path;
  char delimiter = ',';
  bool header = true;
  ColumnRef label_column = -1;
  std::optional<std::vector<ColumnRef>> feature_columns;  // default: every other column
};

/// Error raised while reading a CSV; row and column are 1-based (0 = n/a).
class CsvError : public Error {
 public:
  CsvError(ErrorCode code, std::size_t row, std::size_t column, const std::string& what);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Labels are mapped to class indices in order of first appearance; the
/// original strings are kept as class names. Row order is preserved.
Dataset<double> load_csv(const CsvSchema& schema);

/// Writes features then a trailing `label` column; class names when present.
void write_csv(const Dataset<double>& data, const std::filesystem::path& path);

}  // namespace ikf
