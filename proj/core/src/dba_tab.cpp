#include "dba/dba_tab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dba {

std::vector<double> default_r_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(0.1 * i);
  for (int i = 0; i <= 18; ++i) grid.push_back(1.0 + 0.5 * i);
  return grid;
}

std::vector<Eigen::Index> nearest_opposite(const Dataset& D,
                                           const Eigen::Ref<const Eigen::VectorXd>& x0,
                                           const Classifier& f, int k,
                                           std::vector<std::string>* warnings) {
  if (k < 1) throw std::invalid_argument("nearest_opposite: k must be >= 1");
  if (x0.size() != D.dim()) throw std::invalid_argument("nearest_opposite: dimension mismatch");

  const int target = -f.label(x0);
  std::vector<std::pair<double, Eigen::Index>> candidates;
  int label_deviations = 0;
  for (Eigen::Index i = 0; i < D.n(); ++i) {
    const int fi = f.label(D.points.row(i));
    if (fi != D.labels[i]) ++label_deviations;
    if (fi == target)
      candidates.emplace_back((D.points.row(i).transpose() - x0).norm(), i);
  }
  if (candidates.empty())
    throw std::runtime_error("nearest_opposite: no training points of the opposite class");
  if (warnings && label_deviations > 0)
    warnings->push_back("classifier disagrees with stored labels on " +
                        std::to_string(label_deviations) + " training points");

  // Ascending distance, ties by index.
  std::sort(candidates.begin(), candidates.end());

  if (static_cast<int>(candidates.size()) < k) {
    if (warnings)
      warnings->push_back("only " + std::to_string(candidates.size()) +
                          " opposite-class points available, requested k=" + std::to_string(k));
    k = static_cast<int>(candidates.size());
  }

  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(candidates[static_cast<std::size_t>(i)].second);
  return out;
}

Eigen::VectorXd bisect_boundary(const Classifier& f,
                                const Eigen::Ref<const Eigen::VectorXd>& a,
                                const Eigen::Ref<const Eigen::VectorXd>& b, double tol,
                                int max_iter) {
  if (max_iter < 1) throw std::invalid_argument("bisect: max_iter must be >= 1");
  const int fa = f.label(a);
  if (fa == f.label(b)) throw std::invalid_argument("bisect: endpoints have the same label");

  const double segment = (b - a).norm();
  Eigen::VectorXd lo = a;
  Eigen::VectorXd hi = b;
  Eigen::VectorXd mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < max_iter; ++iter) {
    mid = 0.5 * (lo + hi);
    if (f.label(mid) == fa)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo).norm() <= tol * segment) break;
  }
  return mid;
}

BoundaryDetection detect(const Dataset& D, const Eigen::Ref<const Eigen::VectorXd>& x0,
                         const Classifier& f, const DbaParams& params,
                         std::vector<std::string>* warnings) {
  const auto neighbors = nearest_opposite(D, x0, f, params.k, warnings);

  BoundaryDetection best;
  best.candidates_examined = static_cast<int>(neighbors.size());
  best.distance = std::numeric_limits<double>::infinity();
  for (const Eigen::Index j : neighbors) {
    const Eigen::VectorXd candidate =
        bisect_boundary(f, x0, D.points.row(j).transpose(), params.bisect_tol,
                        params.bisect_max_iter);
    const double dist = (candidate - x0).norm();
    if (dist < best.distance) {
      best.distance = dist;
      best.boundary_point = candidate;
      best.bisected_point = D.points.row(j).transpose();
    }
  }
  return best;
}

SimulationSample simulate(const Classifier& f, const Eigen::Ref<const Eigen::VectorXd>& x_b,
                          const Eigen::Ref<const Eigen::VectorXd>& x0, double r, int m,
                          const Eigen::Ref<const Eigen::MatrixXd>& basis, CounterRng& rng) {
  if (!(r > 0.0)) throw std::invalid_argument("simulate: r must be > 0");
  if (m < 1) throw std::invalid_argument("simulate: m must be >= 1");
  if (basis.rows() < 1 || basis.cols() != x_b.size())
    throw std::invalid_argument("simulate: basis must be p x dim");
  if (x_b.size() != x0.size()) throw std::invalid_argument("simulate: dimension mismatch");

  const double alpha = r * (x_b - x0).norm();
  if (alpha == 0.0)
    throw std::invalid_argument("simulate: x_b equals x0, sampling hull is degenerate");

  const Eigen::Index p = basis.rows();
  const Eigen::Index dim = x_b.size();

  SimulationSample sample;
  sample.alpha = alpha;
  sample.vertices.resize(2 * p, dim);
  for (Eigen::Index j = 0; j < p; ++j) {
    sample.vertices.row(2 * j) = (x_b - alpha * basis.row(j).transpose()).transpose();
    sample.vertices.row(2 * j + 1) = (x_b + alpha * basis.row(j).transpose()).transpose();
  }

  sample.points.resize(m, dim);
  sample.labels.resize(m);
  sample.weights.resize(m, 2 * p);
  for (int i = 0; i < m; ++i) {
    // Normalized i.i.d. exponentials are exactly uniform on the simplex.
    double total = 0.0;
    for (Eigen::Index v = 0; v < 2 * p; ++v) {
      const double e = rng.exponential();
      sample.weights(i, v) = e;
      total += e;
    }
    sample.weights.row(i) /= total;
    sample.points.row(i) = sample.weights.row(i) * sample.vertices;
    sample.labels[i] = f.label(sample.points.row(i).transpose());
  }
  return sample;
}

std::optional<double> boundary_distance_along(const Classifier& f,
                                              const Eigen::Ref<const Eigen::VectorXd>& x0,
                                              const Eigen::Ref<const Eigen::VectorXd>& direction,
                                              double gamma, double tol, int max_iter) {
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("boundary_distance_along: zero direction");
  if (!(gamma > 0.0)) throw std::invalid_argument("boundary_distance_along: gamma must be > 0");

  const int f0 = f.label(x0);
  const Eigen::VectorXd probe = x0 - (static_cast<double>(f0) * gamma / norm) * direction;
  if (f.label(probe) == f0) return std::nullopt;
  const Eigen::VectorXd root = bisect_boundary(f, x0, probe, tol, max_iter);
  return (root - x0).norm();
}

std::optional<double> boundary_distance_with_policy(
    const Classifier& f, const Eigen::Ref<const Eigen::VectorXd>& x0,
    const Eigen::Ref<const Eigen::VectorXd>& direction, double gamma0,
    const GammaPolicy& policy, double tol, int max_iter) {
  double gamma = gamma0;
  for (int attempt = 0; attempt <= policy.doublings; ++attempt) {
    const auto distance = boundary_distance_along(f, x0, direction, gamma, tol, max_iter);
    if (distance) return distance;
    gamma *= 2.0;
  }
  return std::nullopt;
}

DbaResult tune_and_explain(const Dataset& D, const Eigen::Ref<const Eigen::VectorXd>& x0,
                           const Classifier& f, const DbaParams& params, CounterRng rng,
                           const BoundaryDetection* precomputed_detection) {
  if (params.r_grid.empty()) throw std::invalid_argument("dba: empty r grid");
  if (params.m < static_cast<int>(D.dim()) + 1)
    throw std::invalid_argument("dba: m must be >= dim + 1");

  DbaResult result;
  result.explanation.method = "dba-tab";
  result.explanation.names = D.feature_names;
  result.detection = precomputed_detection
                         ? *precomputed_detection
                         : detect(D, x0, f, params, &result.explanation.warnings);

  const Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(D.dim(), D.dim());
  const double gamma = result.detection.distance + 0.1;

  double best_distance = std::numeric_limits<double>::infinity();
  bool have_winner = false;

  for (std::size_t ri = 0; ri < params.r_grid.size(); ++ri) {
    const double r = params.r_grid[ri];
    // Independent stream per r: results do not depend on grid traversal.
    CounterRng stream = rng.split(static_cast<std::uint64_t>(ri));
    SimulationSample sample =
        simulate(f, result.detection.boundary_point, x0, r, params.m, basis, stream);

    const bool pos = (sample.labels.array() == 1).any();
    const bool neg = (sample.labels.array() == -1).any();
    if (!pos || !neg) {
      result.explanation.warnings.push_back("r=" + std::to_string(r) +
                                            ": single-class sample, skipped");
      result.explanation.r_distances.emplace_back(r, std::nullopt);
      continue;
    }

    const LinearModel surrogate =
        fit_logistic(sample.points, sample.labels, 0.0, nullptr, params.surrogate);
    const auto distance =
        boundary_distance_along(f, x0, surrogate.coefficients, gamma, params.bisect_tol,
                                params.bisect_max_iter);
    result.explanation.r_distances.emplace_back(r, distance);

    if (distance && *distance < best_distance) {
      best_distance = *distance;
      have_winner = true;
      result.explanation.coefficients = surrogate.coefficients;
      result.explanation.intercept = surrogate.intercept;
      result.explanation.chosen_r = r;
      result.sample = std::move(sample);
    }
  }

  if (!have_winner) {
    std::string detail = "dba: no r in the grid produced a usable surrogate (";
    detail += std::to_string(params.r_grid.size()) + " tried, all single-class or no crossing)";
    throw std::runtime_error(detail);
  }

  result.explanation.boundary_point = result.detection.boundary_point;
  result.explanation.bisected_point = result.detection.bisected_point;
  result.explanation.sample_size = params.m;
  return result;
}

}  // namespace dba
