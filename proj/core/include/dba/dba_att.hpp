#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "dba/codec.hpp"
#include "dba/dba_tab.hpp"

namespace dba {

// Linear probe from latent space to one binary attribute:
// a(z) = sigmoid(theta . z + theta0).
struct Annotator {
  Eigen::VectorXd theta;
  double theta0 = 0.0;
  std::string attribute;

  double probability(const Eigen::Ref<const Eigen::VectorXd>& z) const {
    const double t = theta.dot(z) + theta0;
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  }
};

// L2-penalized logistic fit of one attribute on latent representations.
Annotator train_annotator(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                          const Eigen::Ref<const Eigen::VectorXi>& labels, double lambda,
                          std::string attribute_name = "",
                          const LogisticOptions& options = {});

// Raised when the codec does not preserve f's label on the point to be
// explained; no explanation is ever produced past this check.
class LabelInstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttributeExplanation {
  Eigen::VectorXd coefficients;      // on the standardized attribute scale
  Eigen::VectorXd raw_coefficients;  // coefficients / attribute sd (raw a-scale)
  double intercept = 0.0;
  Eigen::VectorXd attribute_means;  // standardization over the winning sample
  Eigen::VectorXd attribute_sds;
  std::vector<std::string> attribute_names;  // retained attributes
  std::vector<int> retained;                 // their indices into the annotator list
  Eigen::VectorXd latent_boundary_point;     // z_b
  Eigen::VectorXd latent_direction;          // u = sum_j raw_beta_j theta_j
  double chosen_r = 0.0;
  int sample_size = 0;
  std::string method;
  std::vector<std::pair<double, std::optional<double>>> r_distances;
  std::vector<std::string> warnings;
};

struct AttExplainResult {
  AttributeExplanation explanation;
  BoundaryDetection detection;       // in latent space
  SimulationSample sample;           // latent-space points of the winning r
  Eigen::MatrixXd attribute_sample;  // m x p_retained, standardized attributes
};

// Attribute-space DBA: detection and simulation run in the codec's latent
// space (labels via z -> decode -> f), simulation vertices are
// z_b +- alpha * theta_j, samples map to attribute probabilities, get
// standardized by their sample mean/sd, and an unpenalized logistic
// surrogate is fit over attributes. r is tuned exactly like DBA-Tab with
// distances probed in Z along the reconstructed latent direction.
// Throws LabelInstabilityError if the codec flips f's label on x0;
// attributes with zero sample sd are dropped with a warning per r.
// Callers that already encoded the training set or ran the latent detection
// may pass those in.
AttExplainResult explain_att(const Dataset& D, const Eigen::Ref<const Eigen::VectorXd>& x0,
                             const Classifier& f, const Codec& codec,
                             const std::vector<Annotator>& annotators,
                             const DbaParams& params, CounterRng rng,
                             const Eigen::MatrixXd* latent_train = nullptr,
                             const BoundaryDetection* precomputed_detection = nullptr);

// u = sum over retained attributes of (beta_j / sd_j) * theta_j.
Eigen::VectorXd latent_direction(const AttributeExplanation& explanation,
                                 const std::vector<Annotator>& annotators);

// Fraction of rows whose hard label survives the codec round trip.
double label_stability(const Codec& codec, const Classifier& f,
                       const Eigen::Ref<const Eigen::MatrixXd>& X);

// Mean |c(x) - c(decode(encode(x)))| over rows; requires a probability.
double probability_stability(const Codec& codec, const Classifier& f,
                             const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace dba
