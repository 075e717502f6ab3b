#pragma once

#include <Eigen/Dense>
#include <optional>

namespace dba {

// Fitted linear model with solver diagnostics. The intercept is stored apart
// from the coefficients and is never penalized.
struct LinearModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool ridge_jittered = false;  // WLS rank-deficiency fallback was used

  double score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return coefficients.dot(x) + intercept;
  }
};

struct LogisticOptions {
  double tolerance = 1e-8;  // on the gradient norm of the penalized objective
  int max_iterations = 200;
};

// (Weighted) penalized logistic objective and its gradient at
// params = [intercept, coefficients...]. Exposed so tests can check the
// analytic gradient against finite differences independently of the solver.
//   L = sum_i w_i log(1 + exp(-y_i (b0 + x_i . b))) + (lambda/2) |b|^2
std::pair<double, Eigen::VectorXd> logistic_objective(
    const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
    double lambda, const Eigen::VectorXd* weights,
    const Eigen::Ref<const Eigen::VectorXd>& params);

// Damped Newton (IRLS with step halving) on the penalized logistic loss.
// y in {-1,+1}; lambda >= 0 penalizes coefficients only. On separable data
// with lambda = 0 the iteration cap is reached and converged = false, but the
// coefficient direction is stable, which is all DBA consumes. A micro-ridge
// (1e-10) kicks in only if a Newton step turns non-finite.
LinearModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXi>& y, double lambda = 0.0,
                         const Eigen::VectorXd* weights = nullptr,
                         const LogisticOptions& options = {});

// Weighted least squares with intercept, solved via the normal equations.
// Rank deficiency triggers a ridge jitter on the coefficient block, recorded
// in the result.
LinearModel fit_wls(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& weights);

// 1 - weighted SSE / weighted total SS about the weighted mean. May be
// negative; nullopt when the weighted target variance is zero.
std::optional<double> weighted_r2(const LinearModel& model,
                                  const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& y,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights);

}  // namespace dba
