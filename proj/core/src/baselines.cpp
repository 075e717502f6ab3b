#include "dba/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "dba/glm.hpp"

namespace dba {

double default_lime_sigma(Eigen::Index dimension) {
  return 0.75 * std::sqrt(static_cast<double>(dimension));
}

Eigen::MatrixXd lime_sample(const Eigen::Ref<const Eigen::VectorXd>& means,
                            const Eigen::Ref<const Eigen::VectorXd>& sds, int m,
                            CounterRng& rng) {
  if (m < 1) throw std::invalid_argument("lime_sample: m must be >= 1");
  if (means.size() != sds.size()) throw std::invalid_argument("lime_sample: stats mismatch");
  if ((sds.array() < 0.0).any()) throw std::invalid_argument("lime_sample: negative sd");

  Eigen::MatrixXd samples(m, means.size());
  for (int i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < means.size(); ++j)
      samples(i, j) = means[j] + sds[j] * rng.gaussian();
  return samples;
}

Eigen::VectorXd lime_weights(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                             const Eigen::Ref<const Eigen::VectorXd>& x0, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("lime_weights: sigma must be > 0");
  if (samples.cols() != x0.size()) throw std::invalid_argument("lime_weights: dim mismatch");
  return (-(samples.rowwise() - x0.transpose()).rowwise().squaredNorm() / (sigma * sigma))
      .array()
      .exp();
}

namespace {

// Targets are probabilities when available, else labels mapped to {0,1}.
void fill_targets_and_labels(const Classifier& f, const Eigen::MatrixXd& points,
                             Eigen::VectorXd& targets, Eigen::VectorXi& labels) {
  targets.resize(points.rows());
  labels.resize(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Eigen::VectorXd x = points.row(i).transpose();
    labels[i] = f.label(x);
    targets[i] = f.has_probability() ? f.probability(x) : (labels[i] + 1) / 2.0;
  }
}

}  // namespace

LimeResult lime_explain(const Eigen::Ref<const Eigen::VectorXd>& train_means,
                        const Eigen::Ref<const Eigen::VectorXd>& train_sds,
                        const Eigen::Ref<const Eigen::VectorXd>& x0, const Classifier& f,
                        const LimeParams& params, CounterRng rng,
                        const std::vector<std::string>& feature_names) {
  if ((train_sds.array() <= 0.0).any())
    throw std::invalid_argument("lime: training sds must be > 0");
  const double sigma = params.sigma.value_or(default_lime_sigma(x0.size()));

  LimeResult result;
  result.samples = lime_sample(train_means, train_sds, params.m, rng);
  result.weights = lime_weights(result.samples, x0, sigma);
  fill_targets_and_labels(f, result.samples, result.targets, result.labels);

  const LinearModel model = fit_wls(result.samples, result.targets, result.weights);
  if (model.ridge_jittered)
    result.explanation.warnings.push_back("lime: rank-deficient sample, ridge jitter applied");

  result.explanation.method = "lime-tab";
  result.explanation.coefficients = model.coefficients;
  result.explanation.intercept = model.intercept;
  result.explanation.sample_size = params.m;
  result.explanation.names = feature_names;
  const auto r2 = weighted_r2(model, result.samples, result.targets, result.weights);
  result.explanation.weighted_r2 = r2;
  if (!r2)
    result.explanation.warnings.push_back(
        "lime: constant targets over the sample, weighted R^2 undefined");
  return result;
}

LimeAttResult lime_att_explain(const Eigen::Ref<const Eigen::VectorXd>& latent_means,
                               const Eigen::Ref<const Eigen::VectorXd>& latent_sds,
                               const Eigen::Ref<const Eigen::VectorXd>& x0,
                               const Classifier& f, const Codec& codec,
                               const std::vector<Annotator>& annotators,
                               const LimeParams& params, CounterRng rng) {
  const Eigen::Index p = static_cast<Eigen::Index>(annotators.size());
  if (p < 1) throw std::invalid_argument("lime-att: need at least one annotator");
  const Eigen::Index l = codec.latent_dim();
  if (latent_means.size() != l || latent_sds.size() != l)
    throw std::invalid_argument("lime-att: latent stats do not match codec dimension");
  if ((latent_sds.array() <= 0.0).any())
    throw std::invalid_argument("lime-att: latent sds must be > 0");

  const double sigma = params.sigma.value_or(default_lime_sigma(l));
  const Eigen::VectorXd z0 = codec.encode(x0);
  const LatentClassifier latent_f(codec, f);

  LimeAttResult result;
  result.explanation.method = "lime-att";
  result.latent_samples = lime_sample(latent_means, latent_sds, params.m, rng);
  result.weights = lime_weights(result.latent_samples, z0, sigma);
  fill_targets_and_labels(latent_f, result.latent_samples, result.targets, result.labels);

  Eigen::MatrixXd A(params.m, p);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      A(i, j) = annotators[static_cast<std::size_t>(j)].probability(
          result.latent_samples.row(i).transpose());

  Eigen::VectorXd means = A.colwise().mean();
  Eigen::VectorXd sds =
      ((A.rowwise() - means.transpose()).array().square().colwise().mean()).sqrt();

  std::vector<int> retained;
  std::string dropped;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (sds[j] > 1e-12) {
      retained.push_back(static_cast<int>(j));
    } else {
      if (!dropped.empty()) dropped += ", ";
      dropped += annotators[static_cast<std::size_t>(j)].attribute;
    }
  }
  if (retained.empty())
    throw std::runtime_error("lime-att: every attribute is constant over the sample (" +
                             dropped + ")");
  if (!dropped.empty())
    result.explanation.warnings.push_back("dropped degenerate attributes: " + dropped);

  const Eigen::Index pr = static_cast<Eigen::Index>(retained.size());
  Eigen::MatrixXd design(A.rows(), pr);
  Eigen::VectorXd r_means(pr), r_sds(pr);
  for (Eigen::Index jj = 0; jj < pr; ++jj) {
    const Eigen::Index j = retained[static_cast<std::size_t>(jj)];
    r_means[jj] = means[j];
    r_sds[jj] = sds[j];
    design.col(jj) = params.standardize_attributes
                         ? ((A.col(j).array() - means[j]) / sds[j]).matrix().eval()
                         : Eigen::VectorXd(A.col(j));
  }

  const LinearModel model = fit_wls(design, result.targets, result.weights);
  if (model.ridge_jittered)
    result.explanation.warnings.push_back("lime-att: rank-deficient sample, ridge jitter applied");
  result.r2 = weighted_r2(model, design, result.targets, result.weights);
  if (!result.r2)
    result.explanation.warnings.push_back(
        "lime-att: constant targets over the sample, weighted R^2 undefined");

  result.explanation.coefficients = model.coefficients;
  result.explanation.intercept = model.intercept;
  result.explanation.attribute_means = r_means;
  result.explanation.attribute_sds = r_sds;
  result.explanation.retained = retained;
  for (int j : retained)
    result.explanation.attribute_names.push_back(
        annotators[static_cast<std::size_t>(j)].attribute);
  result.explanation.sample_size = params.m;

  const Eigen::VectorXd raw_beta =
      params.standardize_attributes ? model.coefficients.cwiseQuotient(r_sds).eval()
                                    : model.coefficients;
  result.explanation.raw_coefficients = raw_beta;
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(l);
  for (Eigen::Index jj = 0; jj < pr; ++jj)
    direction +=
        raw_beta[jj] *
        annotators[static_cast<std::size_t>(retained[static_cast<std::size_t>(jj)])].theta;
  result.explanation.latent_direction = direction;
  return result;
}

}  // namespace dba
