#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "dba/glm.hpp"
#include "dba/rng.hpp"

namespace {

// Independent 1D oracle: minimize n*softplus(-b) + (lambda/2) b^2 over b by
// two-stage grid refinement (the symmetric data keeps the intercept at 0).
double penalized_1d_optimum(int n_per_side, double lambda) {
  auto objective = [&](double b) {
    const double softplus = b > 0.0 ? std::log1p(std::exp(-b)) : -b + std::log1p(std::exp(b));
    return 2.0 * n_per_side * softplus + 0.5 * lambda * b * b;
  };
  double lo = 0.0, hi = 20.0;
  for (int stage = 0; stage < 8; ++stage) {
    double best = lo, best_value = objective(lo);
    const double step = (hi - lo) / 400.0;
    for (double b = lo; b <= hi; b += step) {
      const double v = objective(b);
      if (v < best_value) {
        best_value = v;
        best = b;
      }
    }
    lo = std::max(0.0, best - 2.0 * step);
    hi = best + 2.0 * step;
  }
  return 0.5 * (lo + hi);
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

}  // namespace

TEST_CASE("symmetric 1D data: positive slope, zero intercept") {
  Eigen::MatrixXd X(4, 1);
  X << -1.0, -1.0, 1.0, 1.0;
  Eigen::VectorXi y(4);
  y << -1, -1, 1, 1;
  const auto model = dba::fit_logistic(X, y, 0.0);
  CHECK(model.coefficients[0] > 0.0);
  CHECK(std::abs(model.intercept) < 1e-6);
}

TEST_CASE("penalized 1D fit matches the grid-search oracle to 1e-6") {
  Eigen::MatrixXd X(4, 1);
  X << -1.0, -1.0, 1.0, 1.0;
  Eigen::VectorXi y(4);
  y << -1, -1, 1, 1;
  const auto model = dba::fit_logistic(X, y, 1.0);
  CHECK(model.converged);
  const double oracle = penalized_1d_optimum(2, 1.0);
  CHECK(std::abs(model.coefficients[0] - oracle) < 1e-6);
}

TEST_CASE("unpenalized fit recovers the generating direction") {
  dba::CounterRng rng(17, "glm-consistency");
  const int n = 5000;
  Eigen::VectorXd beta(3);
  beta << 1.5, -2.0, 0.7;
  const double beta0 = 0.3;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXi y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.gaussian();
    const double t = beta0 + beta.dot(X.row(i));
    const double p = 1.0 / (1.0 + std::exp(-t));
    y[i] = rng.uniform() < p ? 1 : -1;
  }
  const auto model = dba::fit_logistic(X, y, 0.0);
  CHECK(model.converged);
  CHECK(cosine(model.coefficients, beta) >= 0.99);
}

TEST_CASE("analytic gradient matches central finite differences") {
  dba::CounterRng rng(23, "glm-grad");
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30, d = 4;
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXi y(n);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) X(i, j) = rng.gaussian();
      y[i] = rng.uniform() < 0.5 ? -1 : 1;
      w[i] = rng.uniform(0.1, 2.0);
    }
    y[0] = 1;
    y[1] = -1;  // both classes present
    const double lambda = rng.uniform(0.0, 2.0);
    Eigen::VectorXd params(d + 1);
    for (int j = 0; j <= d; ++j) params[j] = rng.uniform(-1.0, 1.0);

    const auto [value, grad] = dba::logistic_objective(X, y, lambda, &w, params);
    (void)value;
    const double h = 1e-6;
    for (int j = 0; j <= d; ++j) {
      Eigen::VectorXd up = params, down = params;
      up[j] += h;
      down[j] -= h;
      const double fd = (dba::logistic_objective(X, y, lambda, &w, up).first -
                         dba::logistic_objective(X, y, lambda, &w, down).first) /
                        (2.0 * h);
      CHECK(std::abs(grad[j] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("penalized fit is invariant to row order and weight-halved duplication") {
  dba::CounterRng rng(31, "glm-invariance");
  const int n = 60, d = 3;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXi y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = rng.gaussian();
    y[i] = X(i, 0) + 0.3 * rng.gaussian() > 0 ? 1 : -1;
  }
  const auto base = dba::fit_logistic(X, y, 0.5);

  // Reversed row order.
  Eigen::MatrixXd Xr = X.colwise().reverse();
  Eigen::VectorXi yr = y.reverse();
  const auto reversed = dba::fit_logistic(Xr, yr, 0.5);
  CHECK((reversed.coefficients - base.coefficients).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(reversed.intercept - base.intercept) < 1e-8);

  // Whole dataset duplicated with halved weights.
  Eigen::MatrixXd X2(2 * n, d);
  X2 << X, X;
  Eigen::VectorXi y2(2 * n);
  y2 << y, y;
  Eigen::VectorXd w2 = Eigen::VectorXd::Constant(2 * n, 0.5);
  const auto doubled = dba::fit_logistic(X2, y2, 0.5, &w2);
  CHECK((doubled.coefficients - base.coefficients).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("separable data: capped but direction-stable") {
  dba::CounterRng rng(37, "glm-separable");
  const int n = 200, d = 3;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXi y(n);
  Eigen::VectorXd w(3);
  w << 1.0, -1.0, 0.5;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = rng.gaussian();
    // Labels exactly realizable by w: margins run continuously down to zero,
    // as in a simulation sample straddling the boundary, so the optimum sits
    // at infinity and the iteration cap is what stops the fit.
    y[i] = w.dot(X.row(i)) >= 0 ? 1 : -1;
  }

  dba::LogisticOptions capped;
  capped.max_iterations = 200;
  const auto at_t = dba::fit_logistic(X, y, 0.0, nullptr, capped);
  CHECK_FALSE(at_t.converged);  // perfect separation, no finite optimum

  capped.max_iterations = 400;
  const auto at_2t = dba::fit_logistic(X, y, 0.0, nullptr, capped);
  CHECK_FALSE(at_2t.converged);
  const Eigen::VectorXd d1 = at_t.coefficients.normalized();
  const Eigen::VectorXd d2 = at_2t.coefficients.normalized();
  CHECK((d1 - d2).norm() < 1e-3);
  CHECK(cosine(at_t.coefficients, w) > 0.9);
}

TEST_CASE("two points with equal weights interpolate") {
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 2.0;
  Eigen::VectorXd y(2);
  y << 1.0, 5.0;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(2);
  const auto model = dba::fit_wls(X, y, w);
  CHECK(model.intercept == doctest::Approx(1.0));
  CHECK(model.coefficients[0] == doctest::Approx(2.0));
}

TEST_CASE("weights concentrated on a duplicated pair pull the fit through it") {
  Eigen::MatrixXd X(4, 1);
  X << 0.0, 1.0, 5.0, 5.0;
  Eigen::VectorXd y(4);
  y << 10.0, -3.0, 2.0, 2.0;
  Eigen::VectorXd w(4);
  w << 1e-9, 1e-9, 1.0, 1.0;
  const auto model = dba::fit_wls(X, y, w);
  CHECK(model.score(Eigen::VectorXd::Constant(1, 5.0)) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("weighted residuals are orthogonal to the design") {
  dba::CounterRng rng(41, "wls-orth");
  const int n = 50, d = 4;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n), w(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = rng.gaussian();
    y[i] = rng.gaussian() * 3.0;
    w[i] = rng.uniform(0.0, 2.0);
  }
  const auto model = dba::fit_wls(X, y, w);
  const Eigen::VectorXd fitted = (X * model.coefficients).array() + model.intercept;
  const Eigen::VectorXd wr = w.cwiseProduct(y - fitted);
  CHECK((X.transpose() * wr).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(wr.sum()) < 1e-8);  // intercept column
}

TEST_CASE("wls rejects all-zero weights") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 2.0;
  Eigen::VectorXd y(3);
  y << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(dba::fit_wls(X, y, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("weighted r2 endpoints") {
  dba::CounterRng rng(43, "r2");
  const int n = 30;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n), w(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.gaussian();
    X(i, 1) = rng.gaussian();
    y[i] = 2.0 * X(i, 0) - X(i, 1) + 0.5;
    w[i] = rng.uniform(0.5, 1.5);
  }
  const auto perfect = dba::fit_wls(X, y, w);
  CHECK(*dba::weighted_r2(perfect, X, y, w) == doctest::Approx(1.0));

  dba::LinearModel flat;
  flat.coefficients = Eigen::VectorXd::Zero(2);
  flat.intercept = w.dot(y) / w.sum();
  CHECK(*dba::weighted_r2(flat, X, y, w) == doctest::Approx(0.0).epsilon(1e-9));

  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(n, 4.0);
  CHECK_FALSE(dba::weighted_r2(flat, X, constant, w).has_value());
}

TEST_CASE("logistic rejects degenerate inputs") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 2.0;
  Eigen::VectorXi same(3);
  same << 1, 1, 1;
  CHECK_THROWS_AS(dba::fit_logistic(X, same, 0.0), std::invalid_argument);

  Eigen::VectorXi y(3);
  y << 1, -1, 1;
  Eigen::MatrixXd bad = X;
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(dba::fit_logistic(bad, y, 0.0), std::invalid_argument);
}
