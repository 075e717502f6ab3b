#include "dba/dba_att.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dba {

namespace {
constexpr double kDegenerateSd = 1e-12;

std::vector<std::string> latent_names(Eigen::Index l) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(l));
  for (Eigen::Index j = 0; j < l; ++j) names.push_back("z" + std::to_string(j));
  return names;
}
}  // namespace

Annotator train_annotator(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                          const Eigen::Ref<const Eigen::VectorXi>& labels, double lambda,
                          std::string attribute_name, const LogisticOptions& options) {
  if (!(lambda > 0.0)) throw std::invalid_argument("annotator: lambda must be > 0");
  const LinearModel model = fit_logistic(Z, labels, lambda, nullptr, options);
  Annotator a;
  a.theta = model.coefficients;
  a.theta0 = model.intercept;
  a.attribute = std::move(attribute_name);
  return a;
}

AttExplainResult explain_att(const Dataset& D, const Eigen::Ref<const Eigen::VectorXd>& x0,
                             const Classifier& f, const Codec& codec,
                             const std::vector<Annotator>& annotators,
                             const DbaParams& params, CounterRng rng,
                             const Eigen::MatrixXd* latent_train,
                             const BoundaryDetection* precomputed_detection) {
  const Eigen::Index p = static_cast<Eigen::Index>(annotators.size());
  if (p < 1) throw std::invalid_argument("dba-att: need at least one annotator");
  const Eigen::Index l = codec.latent_dim();
  for (const auto& a : annotators)
    if (a.theta.size() != l)
      throw std::invalid_argument("dba-att: annotator '" + a.attribute +
                                  "' does not match the codec latent dimension");
  if (params.m < static_cast<int>(p) + 1)
    throw std::invalid_argument("dba-att: m must be >= p + 1");
  if (params.r_grid.empty()) throw std::invalid_argument("dba-att: empty r grid");

  // Label stability at x0 is a hard precondition: if the codec flips the
  // label here, nothing downstream can be trusted.
  const int f0 = f.label(x0);
  if (f.label(codec.decode(codec.encode(x0))) != f0)
    throw LabelInstabilityError(
        "dba-att: codec '" + codec.name() +
        "' does not preserve the classifier label on x0 (round trip flips " +
        std::to_string(f0) + "); refusing to explain through an unstable codec");

  AttExplainResult result;
  result.explanation.method = "dba-att";

  Eigen::MatrixXd Z;
  if (latent_train) {
    if (latent_train->rows() != D.n() || latent_train->cols() != l)
      throw std::invalid_argument("dba-att: precomputed latent training matrix has wrong shape");
    Z = *latent_train;
  } else {
    Z.resize(D.n(), l);
    for (Eigen::Index i = 0; i < D.n(); ++i)
      Z.row(i) = codec.encode(D.points.row(i).transpose()).transpose();
  }
  Dataset DZ{Z, D.labels, latent_names(l)};

  const LatentClassifier latent_f(codec, f);
  const Eigen::VectorXd z0 = codec.encode(x0);

  result.detection = precomputed_detection
                         ? *precomputed_detection
                         : detect(DZ, z0, latent_f, params, &result.explanation.warnings);
  const double gamma = result.detection.distance + 0.1;

  Eigen::MatrixXd basis(p, l);
  for (Eigen::Index j = 0; j < p; ++j) basis.row(j) = annotators[static_cast<std::size_t>(j)].theta.transpose();

  double best_distance = std::numeric_limits<double>::infinity();
  bool have_winner = false;

  for (std::size_t ri = 0; ri < params.r_grid.size(); ++ri) {
    const double r = params.r_grid[ri];
    CounterRng stream = rng.split(static_cast<std::uint64_t>(ri));
    SimulationSample sample =
        simulate(latent_f, result.detection.boundary_point, z0, r, params.m, basis, stream);

    const bool pos = (sample.labels.array() == 1).any();
    const bool neg = (sample.labels.array() == -1).any();
    if (!pos || !neg) {
      result.explanation.warnings.push_back("r=" + std::to_string(r) +
                                            ": single-class sample, skipped");
      result.explanation.r_distances.emplace_back(r, std::nullopt);
      continue;
    }

    // Map the latent sample to attribute probabilities.
    Eigen::MatrixXd A(params.m, p);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < p; ++j)
        A(i, j) = annotators[static_cast<std::size_t>(j)].probability(
            sample.points.row(i).transpose());

    const Eigen::VectorXd means = A.colwise().mean();
    const Eigen::VectorXd sds =
        ((A.rowwise() - means.transpose()).array().square().colwise().mean()).sqrt();

    std::vector<int> retained;
    std::string dropped_names;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (sds[j] > kDegenerateSd) {
        retained.push_back(static_cast<int>(j));
      } else {
        if (!dropped_names.empty()) dropped_names += ", ";
        dropped_names += annotators[static_cast<std::size_t>(j)].attribute;
      }
    }
    if (retained.empty())
      throw std::runtime_error("dba-att: every attribute is constant over the sample (" +
                               dropped_names + ")");
    if (!dropped_names.empty())
      result.explanation.warnings.push_back("r=" + std::to_string(r) +
                                            ": dropped degenerate attributes: " + dropped_names);

    const Eigen::Index pr = static_cast<Eigen::Index>(retained.size());
    Eigen::MatrixXd A_std(A.rows(), pr);
    Eigen::VectorXd r_means(pr), r_sds(pr);
    for (Eigen::Index jj = 0; jj < pr; ++jj) {
      const Eigen::Index j = retained[static_cast<std::size_t>(jj)];
      r_means[jj] = means[j];
      r_sds[jj] = sds[j];
      A_std.col(jj) = (A.col(j).array() - means[j]) / sds[j];
    }

    const LinearModel surrogate =
        fit_logistic(A_std, sample.labels, 0.0, nullptr, params.surrogate);

    // Un-standardize back to the raw attribute scale before composing the
    // latent direction; the standardized coefficients are what users see.
    const Eigen::VectorXd raw_beta = surrogate.coefficients.cwiseQuotient(r_sds);
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(l);
    for (Eigen::Index jj = 0; jj < pr; ++jj)
      direction += raw_beta[jj] * annotators[static_cast<std::size_t>(retained[static_cast<std::size_t>(jj)])].theta;

    // Attribute directions are cruder than DBA-Tab's surrogate normals
    // (annotator sigmoids saturate over the hull), so the crossing can sit
    // beyond the single-shot gamma; widen the reach before declaring failure.
    std::optional<double> distance;
    if (direction.norm() > 0.0)
      distance = boundary_distance_with_policy(latent_f, z0, direction, gamma, GammaPolicy{},
                                               params.bisect_tol, params.bisect_max_iter);
    result.explanation.r_distances.emplace_back(r, distance);

    if (distance && *distance < best_distance) {
      best_distance = *distance;
      have_winner = true;
      result.explanation.coefficients = surrogate.coefficients;
      result.explanation.raw_coefficients = raw_beta;
      result.explanation.intercept = surrogate.intercept;
      result.explanation.attribute_means = r_means;
      result.explanation.attribute_sds = r_sds;
      result.explanation.retained = retained;
      result.explanation.attribute_names.clear();
      for (int j : retained)
        result.explanation.attribute_names.push_back(
            annotators[static_cast<std::size_t>(j)].attribute);
      result.explanation.latent_direction = direction;
      result.explanation.chosen_r = r;
      result.sample = std::move(sample);
      result.attribute_sample = std::move(A_std);
    }
  }

  if (!have_winner)
    throw std::runtime_error("dba-att: no r in the grid produced a usable surrogate");

  result.explanation.latent_boundary_point = result.detection.boundary_point;
  result.explanation.sample_size = params.m;
  return result;
}

Eigen::VectorXd latent_direction(const AttributeExplanation& explanation,
                                 const std::vector<Annotator>& annotators) {
  if (explanation.retained.empty())
    throw std::invalid_argument("latent_direction: explanation has no retained attributes");
  Eigen::VectorXd u =
      Eigen::VectorXd::Zero(annotators.front().theta.size());
  for (Eigen::Index jj = 0; jj < explanation.coefficients.size(); ++jj) {
    const auto& annotator =
        annotators[static_cast<std::size_t>(explanation.retained[static_cast<std::size_t>(jj)])];
    u += explanation.coefficients[jj] / explanation.attribute_sds[jj] * annotator.theta;
  }
  return u;
}

double label_stability(const Codec& codec, const Classifier& f,
                       const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.rows() == 0) throw std::invalid_argument("label_stability: empty data");
  Eigen::Index stable = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd x = X.row(i).transpose();
    if (f.label(codec.decode(codec.encode(x))) == f.label(x)) ++stable;
  }
  return static_cast<double>(stable) / static_cast<double>(X.rows());
}

double probability_stability(const Codec& codec, const Classifier& f,
                             const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.rows() == 0) throw std::invalid_argument("probability_stability: empty data");
  if (!f.has_probability())
    throw std::invalid_argument("probability_stability: classifier has no probability");
  double total = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd x = X.row(i).transpose();
    total += std::abs(f.probability(x) - f.probability(codec.decode(codec.encode(x))));
  }
  return total / static_cast<double>(X.rows());
}

}  // namespace dba
