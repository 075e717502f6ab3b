#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dba/types.hpp"

namespace dba {

// Dataset plus any binary attribute annotations that rode along in the file.
struct LoadedDataset {
  Dataset data;
  Eigen::MatrixXi attributes;  // n x p, entries {-1,+1}; 0 x 0 when absent
  std::vector<std::string> attribute_names;
  LabelMapping label_mapping;
};

// Reads a comma-separated file with a header row ('.' decimal separator,
// UTF-8). The label column must hold exactly two distinct values; the
// lexicographically smaller one maps to -1. Columns whose name starts with
// `attribute_prefix` (when non-empty) are split off as {-1,+1} annotations;
// every remaining column becomes a feature. Errors name the offending
// row/column.
LoadedDataset load_dataset(const std::string& path, const std::string& label_column,
                           const std::string& attribute_prefix = "");

// Separate annotation file: header row, one column per attribute, values in
// {-1,+1} (or {0,1}, mapped). Row count must match `expected_rows`.
std::pair<Eigen::MatrixXi, std::vector<std::string>> load_annotations(
    const std::string& path, Eigen::Index expected_rows);

// Writes features + label (+ attribute columns) with a header row.
void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& label_column = "label",
                       const Eigen::MatrixXi& attributes = {},
                       const std::vector<std::string>& attribute_names = {});

}  // namespace dba
