#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dba/classifier.hpp"
#include "dba/glm.hpp"
#include "dba/rng.hpp"
#include "dba/types.hpp"

namespace dba {

// Default tuning grid: {0.1,...,0.9, 1, 1.5,...,10}.
std::vector<double> default_r_grid();

struct DbaParams {
  int k = 1000;                          // opposite-class neighbors
  int m = 500;                           // simulation sample size
  std::vector<double> r_grid = default_r_grid();
  double bisect_tol = 1e-4;              // relative to segment length
  int bisect_max_iter = 60;
  LogisticOptions surrogate;             // surrogate logistic fit options
};

// Indices (into D) of the k opposite-class points nearest to x0, distances
// ascending, ties by index. Opposite-class membership is judged by querying
// f on the training points, not by the stored labels. Fewer than k available
// appends a warning and returns them all; zero available throws.
std::vector<Eigen::Index> nearest_opposite(const Dataset& D,
                                           const Eigen::Ref<const Eigen::VectorXd>& x0,
                                           const Classifier& f, int k,
                                           std::vector<std::string>* warnings = nullptr);

// Bisection along the segment [a, b] with f(a) != f(b). Each iteration
// evaluates the midpoint of the current bracket and keeps the half whose
// endpoints still disagree; the midpoint of the final iteration is returned,
// so max_iter = 1 yields the midpoint of [a, b]. Converged when the bracket
// shrinks to tol * |b - a|.
Eigen::VectorXd bisect_boundary(const Classifier& f,
                                const Eigen::Ref<const Eigen::VectorXd>& a,
                                const Eigen::Ref<const Eigen::VectorXd>& b, double tol,
                                int max_iter);

struct BoundaryDetection {
  Eigen::VectorXd boundary_point;  // x_b
  Eigen::VectorXd bisected_point;  // x_j, the training point behind x_b
  double distance = 0.0;           // |x_b - x0|
  int candidates_examined = 0;
};

// Bisects the segments to the k nearest opposite-class points and keeps the
// boundary point closest to x0 (ties by candidate index).
BoundaryDetection detect(const Dataset& D, const Eigen::Ref<const Eigen::VectorXd>& x0,
                         const Classifier& f, const DbaParams& params,
                         std::vector<std::string>* warnings = nullptr);

struct SimulationSample {
  Eigen::MatrixXd points;    // m x dim
  Eigen::VectorXi labels;    // f on each point
  double alpha = 0.0;        // r * |x_b - x0|
  Eigen::MatrixXd vertices;  // 2p x dim, rows ordered v_{1,-1}, v_{1,+1}, ...
  Eigen::MatrixXd weights;   // m x 2p simplex draws (each row sums to 1)
};

// Samples m points from the convex hull of the 2p vertices
// v_{j,+-1} = x_b +- alpha * basis_j with weights uniform on the
// 2p-simplex (normalized i.i.d. standard exponentials), labeling each by f.
// basis is p x dim; DBA-Tab passes the identity, DBA-Att passes annotator
// directions. Throws when x_b == x0 (alpha = 0).
SimulationSample simulate(const Classifier& f, const Eigen::Ref<const Eigen::VectorXd>& x_b,
                          const Eigen::Ref<const Eigen::VectorXd>& x0, double r, int m,
                          const Eigen::Ref<const Eigen::MatrixXd>& basis, CounterRng& rng);

// Distance from x0 to the decision boundary along +-direction: probes
// x' = x0 - f(x0) * gamma * direction/|direction| and, if the label flips,
// bisects [x0, x'] and returns |root - x0|. No flip -> nullopt.
std::optional<double> boundary_distance_along(const Classifier& f,
                                              const Eigen::Ref<const Eigen::VectorXd>& x0,
                                              const Eigen::Ref<const Eigen::VectorXd>& direction,
                                              double gamma, double tol, int max_iter);

// Probe with a widening reach: gamma0, 2*gamma0, ... up to 2^doublings,
// then give up. Used where a single-shot gamma cannot be guaranteed to land
// on the far side.
struct GammaPolicy {
  double extra = 0.1;  // gamma0 = |x0 - x_b| + extra
  int doublings = 3;
};

std::optional<double> boundary_distance_with_policy(
    const Classifier& f, const Eigen::Ref<const Eigen::VectorXd>& x0,
    const Eigen::Ref<const Eigen::VectorXd>& direction, double gamma0,
    const GammaPolicy& policy, double tol, int max_iter);

struct DbaResult {
  Explanation explanation;
  BoundaryDetection detection;
  SimulationSample sample;  // the winning r's sample
};

// Full DBA-Tab pipeline: detect, then for each r in the grid simulate, fit an
// unpenalized logistic surrogate and probe the boundary distance along its
// coefficients with gamma = |x0 - x_b| + 0.1; the r with the smallest
// distance wins (failures count as +inf, ties go to the smallest r).
// A caller that already ran detect for this x0 may pass the result.
DbaResult tune_and_explain(const Dataset& D, const Eigen::Ref<const Eigen::VectorXd>& x0,
                           const Classifier& f, const DbaParams& params, CounterRng rng,
                           const BoundaryDetection* precomputed_detection = nullptr);

}  // namespace dba
