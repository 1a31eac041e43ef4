#include "ikf/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <unordered_map>

namespace ikf {
namespace {

std::string location(std::size_t row, std::size_t column) {
  std::string out = "row " + std::to_string(row);
  if (column > 0) out += ", column " + std::to_string(column);
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (ch == delimiter && !quoted) {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& names, std::size_t width) {
  if (const auto* name = std::get_if<std::string>(&ref)) {
    for (std::size_t c = 0; c < names.size(); ++c)
      if (names[c] == *name) return c;
    throw CsvError(ErrorCode::ParseError, 1, 0, "no column named '" + *name + "'");
  }
  const int idx = std::get<int>(ref);
  const long long resolved = idx < 0 ? static_cast<long long>(width) + idx : idx;
  if (resolved < 0 || resolved >= static_cast<long long>(width))
    throw CsvError(ErrorCode::ParseError, 1, 0,
                   "column index " + std::to_string(idx) + " outside a " + std::to_string(width) +
                       "-column file");
  return static_cast<std::size_t>(resolved);
}

}  // namespace

CsvError::CsvError(ErrorCode code, std::size_t row, std::size_t column, const std::string& what)
    : Error(code, (row > 0 ? location(row, column) + ": " : std::string{}) + what),
      row_(row),
      column_(column) {}

Dataset<double> load_csv(const CsvSchema& schema) {
  std::ifstream in(schema.path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + schema.path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, schema.delimiter);
    if (schema.header && names.empty() && rows.empty()) {
      names = std::move(fields);
      continue;
    }
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw CsvError(ErrorCode::ParseError, 0, 0, schema.path.string() + " has no data rows");

  const std::size_t width = schema.header ? names.size() : rows.front().size();
  if (width < 2) throw CsvError(ErrorCode::ParseError, 1, 0, "need a label column and at least one feature");
  const std::size_t label_col = resolve(schema.label_column, names, width);
  std::vector<std::size_t> feature_cols;
  if (schema.feature_columns) {
    for (const auto& ref : *schema.feature_columns) feature_cols.push_back(resolve(ref, names, width));
  } else {
    for (std::size_t c = 0; c < width; ++c)
      if (c != label_col) feature_cols.push_back(c);
  }
  if (feature_cols.empty()) throw CsvError(ErrorCode::ParseError, 1, 0, "no feature columns selected");

  FeatureMatrix<double> features(static_cast<Eigen::Index>(rows.size()),
                                 static_cast<Eigen::Index>(feature_cols.size()));
  std::vector<int> labels;
  labels.reserve(rows.size());
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_index;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    const std::size_t row_no = line_numbers[r];
    if (fields.size() != width)
      throw CsvError(ErrorCode::ParseError, row_no, 0,
                     "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));

    const std::string& label = fields[label_col];
    if (label.empty()) throw CsvError(ErrorCode::MissingLabel, row_no, label_col + 1, "empty label");
    auto [it, inserted] = class_index.try_emplace(label, static_cast<int>(class_names.size()));
    if (inserted) class_names.push_back(label);
    labels.push_back(it->second);

    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      const std::string& cell = fields[feature_cols[f]];
      double value = 0.0;
      const auto* end = cell.data() + cell.size();
      const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
      if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw CsvError(ErrorCode::NonNumericFeature, row_no, feature_cols[f] + 1,
                       "feature cell '" + cell + "' is not a finite number");
      features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = value;
    }
  }
  const int c = static_cast<int>(class_names.size());
  return Dataset<double>(std::move(features), std::move(labels), c, std::move(class_names));
}

void write_csv(const Dataset<double>& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < data.dims(); ++j) out << 'x' << j << ',';
  out << "label\n";
  const auto& names = data.class_names();
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (Eigen::Index j = 0; j < data.dims(); ++j) out << data.features()(static_cast<Eigen::Index>(r), j) << ',';
    const int y = data.labels()[r];
    if (names.empty()) {
      out << y;
    } else {
      out << names[static_cast<std::size_t>(y)];
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace ikf
