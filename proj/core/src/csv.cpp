#include "dba/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dba {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  const std::string t = trim(cell);
  double value = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::runtime_error("csv: non-numeric cell '" + cell + "' at data row " +
                             std::to_string(row + 1) + ", column '" + column + "'");
  return value;
}

std::vector<std::vector<std::string>> read_table(const std::string& path,
                                                 std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: '" + path + "' is empty");
  header = split_line(line);
  for (auto& h : header) h = trim(h);

  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("csv: line " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    rows.push_back(std::move(cells));
  }
  return rows;
}

int parse_attribute_value(const std::string& cell, std::size_t row, const std::string& column) {
  const double v = parse_number(cell, row, column);
  if (v == 1.0) return 1;
  if (v == -1.0 || v == 0.0) return -1;  // {0,1} accepted, 0 maps to -1
  throw std::runtime_error("csv: attribute value '" + cell + "' at data row " +
                           std::to_string(row + 1) + ", column '" + column +
                           "' is not in {-1,+1} or {0,1}");
}

}  // namespace

LoadedDataset load_dataset(const std::string& path, const std::string& label_column,
                           const std::string& attribute_prefix) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  if (rows.empty()) throw std::runtime_error("csv: '" + path + "' has no data rows");

  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end())
    throw std::runtime_error("csv: label column '" + label_column + "' not found in '" +
                             path + "'");
  const std::size_t label_idx = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::size_t> feature_idx, attribute_idx;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == label_idx) continue;
    if (!attribute_prefix.empty() && header[j].rfind(attribute_prefix, 0) == 0)
      attribute_idx.push_back(j);
    else
      feature_idx.push_back(j);
  }
  if (feature_idx.empty()) throw std::runtime_error("csv: no feature columns in '" + path + "'");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  LoadedDataset out;
  out.data.points.resize(n, static_cast<Eigen::Index>(feature_idx.size()));
  out.data.labels.resize(n);
  for (std::size_t j : feature_idx) out.data.feature_names.push_back(header[j]);
  out.attributes.resize(n, static_cast<Eigen::Index>(attribute_idx.size()));
  for (std::size_t j : attribute_idx) out.attribute_names.push_back(header[j]);

  // Label values: exactly two distinct raw strings, smaller one -> -1.
  std::set<std::string> label_values;
  for (const auto& row : rows) label_values.insert(trim(row[label_idx]));
  if (label_values.size() != 2)
    throw std::runtime_error("csv: label column '" + label_column + "' has " +
                             std::to_string(label_values.size()) +
                             " distinct values, need exactly 2");
  out.label_mapping.negative = *label_values.begin();
  out.label_mapping.positive = *std::next(label_values.begin());

  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t jj = 0; jj < feature_idx.size(); ++jj)
      out.data.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)) =
          parse_number(rows[i][feature_idx[jj]], i, header[feature_idx[jj]]);
    for (std::size_t jj = 0; jj < attribute_idx.size(); ++jj)
      out.attributes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)) =
          parse_attribute_value(rows[i][attribute_idx[jj]], i, header[attribute_idx[jj]]);
    out.data.labels[static_cast<Eigen::Index>(i)] =
        trim(rows[i][label_idx]) == out.label_mapping.negative ? -1 : 1;
  }

  out.data.validate();
  return out;
}

std::pair<Eigen::MatrixXi, std::vector<std::string>> load_annotations(
    const std::string& path, Eigen::Index expected_rows) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  if (static_cast<Eigen::Index>(rows.size()) != expected_rows)
    throw std::runtime_error("csv: annotation file '" + path + "' has " +
                             std::to_string(rows.size()) + " rows, expected " +
                             std::to_string(expected_rows));
  Eigen::MatrixXi atts(expected_rows, static_cast<Eigen::Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < header.size(); ++j)
      atts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_attribute_value(rows[i][j], i, header[j]);
  return {atts, header};
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& label_column, const Eigen::MatrixXi& attributes,
                       const std::vector<std::string>& attribute_names) {
  if (attributes.size() > 0 && attributes.rows() != data.n())
    throw std::invalid_argument("csv: attribute row count does not match dataset");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  out.precision(17);

  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    out << (data.feature_names.empty() ? "x" + std::to_string(j) : data.feature_names[j]);
    out << ',';
  }
  out << label_column;
  for (const auto& name : attribute_names) out << ',' << name;
  out << '\n';

  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << data.points(i, j) << ',';
    out << data.labels[i];
    for (Eigen::Index j = 0; j < attributes.cols(); ++j) out << ',' << attributes(i, j);
    out << '\n';
  }
  if (!out) throw std::runtime_error("csv: write failed for '" + path + "'");
}

}  // namespace dba
