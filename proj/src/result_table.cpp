#include "fidtrust/result_table.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fidtrust {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
  return v;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t p = 0; p < line.size(); ++p) {
    const char c = line[p];
    if (quoted) {
      if (c == '"' && p + 1 < line.size() && line[p + 1] == '"') {
        fields.back() += '"';
        ++p;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  return fields;
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  for (std::size_t a = 0; a < columns_.size(); ++a) {
    if (columns_[a].empty() || columns_[a] == "label") throw std::invalid_argument("result table: bad column name");
    for (std::size_t b = 0; b < a; ++b) {
      if (columns_[a] == columns_[b]) throw std::invalid_argument("result table: duplicate column " + columns_[a]);
    }
  }
}

void ResultTable::add_row(std::string label, std::vector<double> values) {
  if (values.size() != columns_.size()) {
    throw std::invalid_argument("result table: row '" + label + "' has " + std::to_string(values.size()) +
                                " values for " + std::to_string(columns_.size()) + " columns");
  }
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (!std::isfinite(values[c])) {
      throw std::invalid_argument("result table: row '" + label + "' column " + columns_[c] + " is not finite");
    }
  }
  for (const auto& r : rows_) {
    if (r.label == label) throw std::invalid_argument("result table: duplicate row label '" + label + "'");
  }
  rows_.push_back({std::move(label), std::move(values)});
}

bool ResultTable::has_column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c == name) return true;
  }
  return false;
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == name) return c;
  }
  throw std::invalid_argument("result table: no column '" + name + "'");
}

std::vector<double> ResultTable::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.values[c]);
  return out;
}

double ResultTable::value(std::size_t row, const std::string& name) const {
  return rows_.at(row).values[column_index(name)];
}

void ResultTable::add_column(const std::string& name, const std::vector<double>& values) {
  if (values.size() != rows_.size()) throw std::invalid_argument("result table: column length mismatch");
  if (has_column(name) || name == "label") throw std::invalid_argument("result table: duplicate column " + name);
  for (const double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("result table: column " + name + " is not finite");
  }
  columns_.push_back(name);
  for (std::size_t r = 0; r < rows_.size(); ++r) rows_[r].values.push_back(values[r]);
}

std::string ResultTable::to_csv() const {
  std::string out = "label";
  for (const auto& c : columns_) out += "," + csv_field(c);
  out += "\n";
  for (const auto& r : rows_) {
    out += csv_field(r.label);
    for (const double v : r.values) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string ResultTable::to_json() const {
  nlohmann::ordered_json doc;
  doc["columns"] = columns_;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    nlohmann::ordered_json row;
    row["label"] = r.label;
    for (std::size_t c = 0; c < columns_.size(); ++c) row[columns_[c]] = r.values[c];
    doc["rows"].push_back(row);
  }
  return doc.dump(2) + "\n";
}

ResultTable ResultTable::from_csv(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw std::runtime_error("csv: empty input");
  auto header = split_csv_line(lines[0]);
  if (header.empty() || header[0] != "label") throw std::runtime_error("csv: first column must be 'label'");
  header.erase(header.begin());
  ResultTable table(header);
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split_csv_line(lines[l]);
    if (fields.size() != header.size() + 1) {
      throw std::runtime_error("csv line " + std::to_string(l + 1) + ": expected " +
                               std::to_string(header.size() + 1) + " fields");
    }
    std::vector<double> values;
    for (std::size_t f = 1; f < fields.size(); ++f) values.push_back(parse_number(fields[f], l + 1));
    table.add_row(fields[0], std::move(values));
  }
  return table;
}

ResultTable read_result_csv(const std::filesystem::path& path) { return ResultTable::from_csv(read_text(path)); }

void join_top5(ResultTable& table, const std::filesystem::path& sidecar) {
  const auto lines = csv_lines(read_text(sidecar));
  if (lines.empty()) throw std::runtime_error(sidecar.string() + ": empty top-5 sidecar");
  const auto header = split_csv_line(lines[0]);
  if (header.size() != 2 || header[0] != "label" || header[1] != "top5") {
    throw std::runtime_error(sidecar.string() + ": header must be 'label,top5'");
  }
  std::vector<std::pair<std::string, double>> entries;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split_csv_line(lines[l]);
    if (fields.size() != 2) throw std::runtime_error(sidecar.string() + ": line " + std::to_string(l + 1));
    entries.emplace_back(fields[0], parse_number(fields[1], l + 1));
  }
  std::vector<double> column;
  for (const auto& row : table.rows()) {
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == row.label; });
    if (it == entries.end()) {
      throw std::runtime_error(sidecar.string() + ": no top-5 entry for '" + row.label + "'");
    }
    column.push_back(it->second);
  }
  table.add_column("top5_accuracy", column);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed for '" + path.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fidtrust
