#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dba/types.hpp"

namespace dba {

// Uniform range of one synthetic-flower parameter.
struct ParamRange {
  double lo;
  double hi;
  double mean() const { return 0.5 * (lo + hi); }
  double sd() const { return (hi - lo) / std::sqrt(12.0); }  // uniform sd
  double midpoint() const { return mean(); }
};

// Flower parameters: petal length/width, sepal length/width, color mix.
struct AirisParams {
  double pl, pw, sl, sw, c;

  Eigen::VectorXd to_vector() const {
    Eigen::VectorXd v(5);
    v << pl, pw, sl, sw, c;
    return v;
  }
  static AirisParams from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);
};

const std::array<ParamRange, 5>& airis_ranges();
const std::vector<std::string>& airis_feature_names();  // {"PL","PW","SL","SW","C"}

// Which side of the plane coeffs . x (cmp) threshold is class-consistent.
enum class PlaneSide { Below, Above };

struct Hyperplane {
  Eigen::VectorXd coefficients;
  double threshold = 0.0;
  PlaneSide class_side = PlaneSide::Below;

  bool satisfied(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const double s = coefficients.dot(x);
    return class_side == PlaneSide::Below ? s < threshold : s > threshold;
  }
  // Euclidean distance from x to the plane coeffs . x = threshold.
  double distance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return std::abs(coefficients.dot(x) - threshold) / coefficients.norm();
  }
};

// Class rule on raw parameters: +1 (class A) iff
//   0.33 PL + 0.33 PW + 0.33 C < 0.5  and  0.33 PL + 0.33 PW + 0.33 SL > 0.4.
// Out-of-range parameters are tolerated; the rule is total.
int airis_class_rule(const AirisParams& p);

// The two raw-space hyperplanes behind airis_class_rule, over (PL,PW,SL,SW,C).
std::pair<Hyperplane, Hyperplane> raw_hyperplanes();

// Same planes after standardizing each parameter by its uniform mean/sd:
// coefficients 0.33*sd per active feature, thresholds 0.0545 and -0.062.
std::pair<Hyperplane, Hyperplane> standardized_hyperplanes();

// Two interleaving half-circles: class A on (cos t, sin t), class B on
// (1 - cos t, 0.5 - sin t), t uniform on [0, pi], plus isotropic Gaussian
// noise of the given sd. Classes alternate by row, balanced within one.
Dataset gen_moons(int n, double noise, std::uint64_t seed);

struct AirisTabular {
  Dataset data;
  Eigen::MatrixXi attributes;  // n x 5, +1 iff parameter > midpoint of range
  std::vector<std::string> attribute_names;
};

// Rows sampled uniformly per parameter range; labels via airis_class_rule;
// binary attribute per parameter, +1 iff strictly above the range midpoint.
AirisTabular gen_airis_tab(int n, std::uint64_t seed);

}  // namespace dba
