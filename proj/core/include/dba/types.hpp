#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dba {

// Training corpus: feature rows plus hard labels in {-1,+1}.
// Immutable by convention once constructed; everything downstream shares it
// by const reference.
struct Dataset {
  Eigen::MatrixXd points;                  // n x d
  Eigen::VectorXi labels;                  // n, entries in {-1,+1}
  std::vector<std::string> feature_names;  // size d

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }

  void validate() const {
    if (points.rows() == 0 || points.cols() == 0)
      throw std::invalid_argument("dataset: empty feature matrix");
    if (labels.size() != points.rows())
      throw std::invalid_argument("dataset: label count does not match row count");
    if (!feature_names.empty() &&
        static_cast<Eigen::Index>(feature_names.size()) != points.cols())
      throw std::invalid_argument("dataset: feature name count does not match columns");
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels[i] != -1 && labels[i] != 1)
        throw std::invalid_argument("dataset: label outside {-1,+1} at row " +
                                    std::to_string(i));
    if (!points.allFinite())
      throw std::invalid_argument("dataset: non-finite feature value");
  }

  bool both_classes_present() const {
    bool pos = false, neg = false;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      (labels[i] == 1 ? pos : neg) = true;
    return pos && neg;
  }
};

// How the two original label values were mapped onto {-1,+1}.
// Lexicographically smaller value maps to -1; recorded for auditability.
struct LabelMapping {
  std::string negative;
  std::string positive;
};

// Linear surrogate explanation. Shared by DBA-Tab and LIME-Tab; fields that a
// method does not produce stay empty (boundary point for LIME, r2 for DBA).
struct Explanation {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  Eigen::VectorXd boundary_point;  // x_b (standardized input space)
  Eigen::VectorXd bisected_point;  // corresponding bisected training point x_j
  double chosen_r = 0.0;
  int sample_size = 0;
  std::string method;
  std::vector<std::string> names;
  std::optional<double> weighted_r2;  // LIME fidelity
  // Tuning trace: (r, probed boundary distance), nullopt = failed to cross.
  std::vector<std::pair<double, std::optional<double>>> r_distances;
  std::vector<std::string> warnings;

  double score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return coefficients.dot(x) + intercept;
  }
};

}  // namespace dba
