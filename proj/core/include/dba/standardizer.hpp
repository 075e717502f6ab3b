#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dba/types.hpp"

namespace dba {

// Per-column affine transform: (x - mean) / sd. Standard deviations use the
// population convention (divide by n), matching the uniform-distribution
// formula (b-a)/sqrt(12) used for the ground-truth hyperplanes.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd sds;  // all > 0
  std::vector<std::string> feature_names;

  Eigen::Index dim() const { return means.size(); }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd inverse(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  Eigen::MatrixXd apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  Eigen::MatrixXd inverse_rows(const Eigen::Ref<const Eigen::MatrixXd>& Z) const;

  std::string to_json() const;
  static Standardizer from_json(const std::string& text);
};

// Fits per-column mean/sd on the training points. Throws if n < 2 or any
// column is constant (names the column).
Standardizer fit_standardizer(const Dataset& data);
Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              std::vector<std::string> feature_names = {});

}  // namespace dba
