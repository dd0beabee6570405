#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace fidtrust {

struct ResultRow {
  std::string label;
  std::vector<double> values;  // one per table column
};

/// One row per condition, a fixed list of numeric columns, and a label.
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<ResultRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Throws std::invalid_argument on a duplicate label, a wrong value
  /// count, or a non-finite value.
  void add_row(std::string label, std::vector<double> values);

  bool has_column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  double value(std::size_t row, const std::string& name) const;

  /// Appends a column; `values` must have one entry per row.
  void add_column(const std::string& name, const std::vector<double>& values);

  /// Header "label,<columns>", one line per row, floats at 17 significant
  /// digits so values round-trip exactly.
  std::string to_csv() const;
  /// {"columns": [...], "rows": [{"label": ..., "<column>": value, ...}]}
  std::string to_json() const;

  static ResultTable from_csv(const std::string& text);

 private:
  std::vector<std::string> columns_;
  std::vector<ResultRow> rows_;
};

ResultTable read_result_csv(const std::filesystem::path& path);

/// Joins a "label,top5" sidecar as a top5_accuracy column. Every row label
/// must appear in the sidecar.
void join_top5(ResultTable& table, const std::filesystem::path& sidecar);

/// %.17g
std::string format_double(double v);

/// Minimal RFC 4180 line splitting (quoted fields, doubled quotes).
std::vector<std::string> split_csv_line(const std::string& line);

/// Writes through a temporary sibling file and renames it into place, so a
/// failed write leaves no partial file behind.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fidtrust
