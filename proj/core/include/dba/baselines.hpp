#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dba/codec.hpp"
#include "dba/dba_att.hpp"
#include "dba/rng.hpp"
#include "dba/types.hpp"

namespace dba {

struct LimeParams {
  int m = 500;
  std::optional<double> sigma;        // default 0.75 * sqrt(dimension)
  bool standardize_attributes = true;  // LIME-Att only
};

double default_lime_sigma(Eigen::Index dimension);

// m i.i.d. draws from the diagonal Gaussian with the training means and
// variances (the reference sampler for continuous features).
Eigen::MatrixXd lime_sample(const Eigen::Ref<const Eigen::VectorXd>& means,
                            const Eigen::Ref<const Eigen::VectorXd>& sds, int m,
                            CounterRng& rng);

// w_i = exp(-|x_i - x0|^2 / sigma^2).
Eigen::VectorXd lime_weights(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                             const Eigen::Ref<const Eigen::VectorXd>& x0, double sigma);

struct LimeResult {
  Explanation explanation;  // weighted_r2 filled in
  Eigen::MatrixXd samples;  // m x d
  Eigen::VectorXd targets;  // probabilities, or {0,1} from hard labels
  Eigen::VectorXd weights;
  Eigen::VectorXi labels;   // f's hard labels on the samples
};

// Weighted least squares on Gaussian samples around the training statistics,
// weighted by distance to x0. Targets are c(x) when the classifier exposes
// probabilities, else hard labels mapped to {0,1}. No LASSO preselection and
// no L2 penalty.
LimeResult lime_explain(const Eigen::Ref<const Eigen::VectorXd>& train_means,
                        const Eigen::Ref<const Eigen::VectorXd>& train_sds,
                        const Eigen::Ref<const Eigen::VectorXd>& x0, const Classifier& f,
                        const LimeParams& params, CounterRng rng,
                        const std::vector<std::string>& feature_names = {});

struct LimeAttResult {
  AttributeExplanation explanation;
  std::optional<double> r2;
  Eigen::MatrixXd latent_samples;  // m x l
  Eigen::VectorXd targets;
  Eigen::VectorXd weights;
  Eigen::VectorXi labels;
};

// LIME in the codec's latent space: Gaussian sampling around the latent
// training statistics, weights by |z - z0| with sigma = 0.75 sqrt(l),
// attribute mapping and standardization identical to DBA-Att, then a WLS
// surrogate over the attributes. Probability queries go through
// z -> decode -> c(x).
LimeAttResult lime_att_explain(const Eigen::Ref<const Eigen::VectorXd>& latent_means,
                               const Eigen::Ref<const Eigen::VectorXd>& latent_sds,
                               const Eigen::Ref<const Eigen::VectorXd>& x0,
                               const Classifier& f, const Codec& codec,
                               const std::vector<Annotator>& annotators,
                               const LimeParams& params, CounterRng rng);

}  // namespace dba
