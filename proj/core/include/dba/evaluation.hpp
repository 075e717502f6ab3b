#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dba/baselines.hpp"
#include "dba/classifier.hpp"
#include "dba/codec.hpp"
#include "dba/datagen.hpp"
#include "dba/dba_att.hpp"
#include "dba/dba_tab.hpp"
#include "dba/types.hpp"

namespace dba {

// Sign accuracy of the surrogate against f's labels on the sample.
double dba_fidelity(const Eigen::Ref<const Eigen::VectorXd>& coefficients, double intercept,
                    const Eigen::Ref<const Eigen::MatrixXd>& points,
                    const Eigen::Ref<const Eigen::VectorXi>& labels);
double dba_fidelity(const Explanation& explanation, const SimulationSample& sample);

// Share of +1 labels.
double class_balance(const Eigen::Ref<const Eigen::VectorXi>& labels);
double class_balance(const SimulationSample& sample);

// (cos-, cos+): |cosine| of beta against the ground-truth hyperplane normals.
// cos+ takes the best-matching plane; cos- takes the plane whose boundary is
// analytically closest to x0. Absolute values make the result invariant to
// the surrogate's label orientation.
std::pair<double, double> cosine_similarity_pm(const Eigen::Ref<const Eigen::VectorXd>& beta,
                                               const std::vector<Hyperplane>& hyperplanes,
                                               const Eigen::Ref<const Eigen::VectorXd>& x0);

// c(x0 + s * step_direction) sampled on s = 0, step, 2*step, ..., s_max;
// falls back to (f+1)/2 when no probability is available.
std::vector<std::pair<double, double>> probability_curve(
    const Classifier& f, const Eigen::Ref<const Eigen::VectorXd>& x0,
    const Eigen::Ref<const Eigen::VectorXd>& direction, double s_max, double step);

struct EvalConfig {
  std::vector<std::string> methods{"dba-tab", "lime-tab"};
  DbaParams dba;
  LimeParams lime;
  std::uint64_t seed = 0;
  GammaPolicy gamma;
  // Admit only test points whose label survives the codec round trip
  // (applies when a codec-based method is requested).
  bool filter_label_stable = true;
  int jobs = 1;
  std::vector<Hyperplane> hyperplanes;  // ground truth in the working space
  std::string config_echo;              // resolved configuration, embedded in reports
};

struct PointRecord {
  int point = 0;  // row index into the candidate matrix
  std::string method;
  std::optional<double> fidelity;
  std::optional<double> r2;
  std::optional<double> balance;
  std::optional<double> distance;  // nullopt = failed to cross
  std::optional<double> cos_minus;
  std::optional<double> cos_plus;
  std::optional<double> chosen_r;
  bool failed = false;
  std::vector<std::string> warnings;
};

struct MethodSummary {
  std::string method;
  int points = 0;
  std::optional<double> mean_fidelity;
  std::optional<double> mean_r2;
  std::optional<double> mean_balance;
  // Mean over the points where no requested method failed to cross.
  std::optional<double> mean_distance;
  int distance_points = 0;
  std::optional<double> mean_cos_minus;
  std::optional<double> mean_cos_plus;
  double failure_pct = 0.0;
};

struct EvaluationReport {
  std::string schema_version = "dba-report/1";
  std::string config_echo;
  std::vector<int> explained_points;
  std::vector<PointRecord> records;
  std::vector<MethodSummary> summaries;

  std::string to_json() const;
  std::string to_csv_table() const;  // one row per method
};

// Explains `count` admissible candidate points (deterministically selected
// from the candidate rows with the run seed) with every requested method and
// aggregates the per-point statistics. count <= 0 explains all admissible
// points in order.
EvaluationReport evaluate_run(const Dataset& train,
                              const Eigen::Ref<const Eigen::MatrixXd>& test_candidates,
                              int count, const Classifier& f, const EvalConfig& config,
                              const Codec* codec = nullptr,
                              const std::vector<Annotator>* annotators = nullptr);

}  // namespace dba
