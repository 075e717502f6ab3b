#include "dba/glm.hpp"

#include <cmath>
#include <stdexcept>

namespace dba {

namespace {

constexpr double kMicroRidge = 1e-10;

double softplus(double u) {
  // log(1 + e^u) without overflow.
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

void check_logistic_inputs(const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::VectorXi>& y,
                           const Eigen::VectorXd* weights) {
  if (X.rows() < 2) throw std::invalid_argument("logistic: need at least 2 rows");
  if (y.size() != X.rows()) throw std::invalid_argument("logistic: label count mismatch");
  if (!X.allFinite()) throw std::invalid_argument("logistic: non-finite feature value");
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1 && y[i] != -1)
      throw std::invalid_argument("logistic: label outside {-1,+1}");
    (y[i] == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) throw std::invalid_argument("logistic: single-class input");
  if (weights) {
    if (weights->size() != X.rows())
      throw std::invalid_argument("logistic: weight count mismatch");
    if ((weights->array() < 0.0).any())
      throw std::invalid_argument("logistic: negative weight");
  }
}

}  // namespace

std::pair<double, Eigen::VectorXd> logistic_objective(
    const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
    double lambda, const Eigen::VectorXd* weights,
    const Eigen::Ref<const Eigen::VectorXd>& params) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (params.size() != d + 1)
    throw std::invalid_argument("logistic: params must be [intercept, coefficients]");

  const double b0 = params[0];
  const auto beta = params.tail(d);

  double value = 0.5 * lambda * beta.squaredNorm();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(d + 1);
  grad.tail(d) = lambda * beta;

  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    if (w == 0.0) continue;
    const double t = b0 + X.row(i).dot(beta);
    const double yi = static_cast<double>(y[i]);
    value += w * softplus(-yi * t);
    const double coef = -w * yi * sigmoid(-yi * t);
    grad[0] += coef;
    grad.tail(d) += coef * X.row(i).transpose();
  }
  return {value, std::move(grad)};
}

LinearModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXi>& y, double lambda,
                         const Eigen::VectorXd* weights, const LogisticOptions& options) {
  check_logistic_inputs(X, y, weights);
  if (lambda < 0.0) throw std::invalid_argument("logistic: lambda must be >= 0");

  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();

  Eigen::VectorXd params = Eigen::VectorXd::Zero(d + 1);
  auto [value, grad] = logistic_objective(X, y, lambda, weights, params);

  LinearModel model;
  double ridge = 0.0;

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (grad.norm() <= options.tolerance) {
      model.converged = true;
      break;
    }

    // Hessian: sum_i w_i p_i (1 - p_i) xt_i xt_i^T + lambda on the
    // coefficient diagonal, with xt_i = [1, x_i].
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d + 1, d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = weights ? (*weights)[i] : 1.0;
      if (w == 0.0) continue;
      const double t = params[0] + X.row(i).dot(params.tail(d));
      const double p = sigmoid(t);
      const double wi = w * p * (1.0 - p);
      if (wi == 0.0) continue;
      Eigen::VectorXd xt(d + 1);
      xt[0] = 1.0;
      xt.tail(d) = X.row(i).transpose();
      hess.noalias() += wi * xt * xt.transpose();
    }
    hess.diagonal().tail(d).array() += lambda + ridge;

    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    if (!step.allFinite()) {
      // Saturated probabilities made the Hessian singular; stabilize.
      ridge = kMicroRidge;
      hess.diagonal().tail(d).array() += ridge;
      step = hess.ldlt().solve(-grad);
      if (!step.allFinite()) break;
    }

    // Step halving keeps the damped Newton iteration monotone.
    double scale = 1.0;
    Eigen::VectorXd candidate;
    double candidate_value = 0.0;
    Eigen::VectorXd candidate_grad;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      candidate = params + scale * step;
      std::tie(candidate_value, candidate_grad) =
          logistic_objective(X, y, lambda, weights, candidate);
      if (std::isfinite(candidate_value) && candidate_value <= value) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;

    params = std::move(candidate);
    value = candidate_value;
    grad = std::move(candidate_grad);
  }

  model.intercept = params[0];
  model.coefficients = params.tail(d);
  model.iterations = iter;
  model.gradient_norm = grad.norm();
  if (model.gradient_norm <= options.tolerance) model.converged = true;

  // Perfect separation: with lambda = 0 the likelihood supremum sits at
  // infinity, so a tiny gradient only means the probabilities saturated.
  // The direction is stable and usable, but the fit is not a real optimum.
  if (model.converged && lambda == 0.0) {
    bool separated = true;
    for (Eigen::Index i = 0; i < n && separated; ++i) {
      if (weights && (*weights)[i] == 0.0) continue;
      const double t = params[0] + X.row(i).dot(params.tail(d));
      if (static_cast<double>(y[i]) * t <= 0.0) separated = false;
    }
    if (separated) model.converged = false;
  }
  return model;
}

LinearModel fit_wls(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (y.size() != n) throw std::invalid_argument("wls: target count mismatch");
  if (weights.size() != n) throw std::invalid_argument("wls: weight count mismatch");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("wls: negative weight");
  if (weights.isZero(0.0)) throw std::invalid_argument("wls: all weights are zero");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("wls: non-finite input");

  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = X;

  const Eigen::MatrixXd wd = weights.asDiagonal() * design;
  Eigen::MatrixXd normal = design.transpose() * wd;
  const Eigen::VectorXd rhs = wd.transpose() * y;

  LinearModel model;
  Eigen::VectorXd params;
  auto solve = [&](const Eigen::MatrixXd& lhs) {
    params = lhs.ldlt().solve(rhs);
    const double residual = (lhs * params - rhs).norm();
    return params.allFinite() && residual <= 1e-8 * (1.0 + rhs.norm());
  };

  if (!solve(normal)) {
    // Rank-deficient normal equations: jitter the coefficient block.
    const double jitter = kMicroRidge * (1.0 + normal.trace() / static_cast<double>(d + 1));
    normal.diagonal().tail(d).array() += jitter;
    if (!solve(normal)) throw std::runtime_error("wls: normal equations unsolvable");
    model.ridge_jittered = true;
  }

  model.intercept = params[0];
  model.coefficients = params.tail(d);
  model.converged = true;
  model.iterations = 1;
  model.gradient_norm = (design.transpose() * (weights.asDiagonal() * (design * params - y))).norm();
  return model;
}

std::optional<double> weighted_r2(const LinearModel& model,
                                  const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& y,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (y.size() != X.rows() || weights.size() != X.rows())
    throw std::invalid_argument("weighted_r2: size mismatch");
  const double wsum = weights.sum();
  if (!(wsum > 0.0)) throw std::invalid_argument("weighted_r2: weights sum to zero");

  const double mean = weights.dot(y) / wsum;
  const double total = weights.dot((y.array() - mean).square().matrix());
  // Zero variance up to rounding of the weighted mean.
  if (total <= 1e-18 * wsum * std::max(1.0, mean * mean)) return std::nullopt;

  const Eigen::VectorXd fitted =
      (X * model.coefficients).array() + model.intercept;
  const double sse = weights.dot((y - fitted).array().square().matrix());
  return 1.0 - sse / total;
}

}  // namespace dba
