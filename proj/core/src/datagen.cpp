#include "dba/datagen.hpp"

#include <stdexcept>

#include "dba/rng.hpp"

namespace dba {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kRuleWeight = 0.33;
constexpr double kH1Threshold = 0.5;
constexpr double kH2Threshold = 0.4;
}  // namespace

const std::array<ParamRange, 5>& airis_ranges() {
  static const std::array<ParamRange, 5> ranges = {{
      {0.3, 0.7},  // PL
      {0.1, 0.7},  // PW
      {0.3, 0.7},  // SL
      {0.1, 0.7},  // SW
      {0.1, 0.8},  // C
  }};
  return ranges;
}

const std::vector<std::string>& airis_feature_names() {
  static const std::vector<std::string> names = {"PL", "PW", "SL", "SW", "C"};
  return names;
}

AirisParams AirisParams::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != 5) throw std::invalid_argument("airis: parameter vector must have length 5");
  return AirisParams{v[0], v[1], v[2], v[3], v[4]};
}

int airis_class_rule(const AirisParams& p) {
  const bool first = kRuleWeight * (p.pl + p.pw + p.c) < kH1Threshold;
  const bool second = kRuleWeight * (p.pl + p.pw + p.sl) > kH2Threshold;
  return (first && second) ? 1 : -1;
}

std::pair<Hyperplane, Hyperplane> raw_hyperplanes() {
  Hyperplane h1, h2;
  h1.coefficients = Eigen::VectorXd::Zero(5);
  h1.coefficients[0] = kRuleWeight;  // PL
  h1.coefficients[1] = kRuleWeight;  // PW
  h1.coefficients[4] = kRuleWeight;  // C
  h1.threshold = kH1Threshold;
  h1.class_side = PlaneSide::Below;

  h2.coefficients = Eigen::VectorXd::Zero(5);
  h2.coefficients[0] = kRuleWeight;  // PL
  h2.coefficients[1] = kRuleWeight;  // PW
  h2.coefficients[2] = kRuleWeight;  // SL
  h2.threshold = kH2Threshold;
  h2.class_side = PlaneSide::Above;
  return {h1, h2};
}

std::pair<Hyperplane, Hyperplane> standardized_hyperplanes() {
  // Substituting x_j = mean_j + sd_j * s_j into the raw rule gives
  // coefficients 0.33*sd_j and shifts the thresholds by 0.33*sum(means).
  auto [h1, h2] = raw_hyperplanes();
  const auto& ranges = airis_ranges();
  for (auto* h : {&h1, &h2}) {
    double shift = 0.0;
    for (Eigen::Index j = 0; j < 5; ++j) {
      shift += h->coefficients[j] * ranges[static_cast<std::size_t>(j)].mean();
      h->coefficients[j] *= ranges[static_cast<std::size_t>(j)].sd();
    }
    h->threshold -= shift;
  }
  return {h1, h2};
}

Dataset gen_moons(int n, double noise, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("moons: need n >= 2");
  if (noise < 0.0) throw std::invalid_argument("moons: noise must be >= 0");

  Dataset d;
  d.points.resize(n, 2);
  d.labels.resize(n);
  d.feature_names = {"x1", "x2"};

  CounterRng rng(seed, "moons");
  for (int i = 0; i < n; ++i) {
    CounterRng row = rng.split(static_cast<std::uint64_t>(i));
    const double t = row.uniform(0.0, kPi);
    double x, y;
    if (i % 2 == 0) {  // class A arc
      x = std::cos(t);
      y = std::sin(t);
      d.labels[i] = 1;
    } else {  // class B arc
      x = 1.0 - std::cos(t);
      y = 0.5 - std::sin(t);
      d.labels[i] = -1;
    }
    d.points(i, 0) = x + noise * row.gaussian();
    d.points(i, 1) = y + noise * row.gaussian();
  }
  return d;
}

AirisTabular gen_airis_tab(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("airis: need n >= 2");
  const auto& ranges = airis_ranges();

  AirisTabular out;
  out.data.points.resize(n, 5);
  out.data.labels.resize(n);
  out.data.feature_names = airis_feature_names();
  out.attributes.resize(n, 5);
  out.attribute_names.reserve(5);
  for (const auto& name : airis_feature_names()) out.attribute_names.push_back("att_" + name);

  CounterRng rng(seed, "airis-tab");
  for (int i = 0; i < n; ++i) {
    CounterRng row = rng.split(static_cast<std::uint64_t>(i));
    for (int j = 0; j < 5; ++j) {
      const auto& range = ranges[static_cast<std::size_t>(j)];
      const double v = row.uniform(range.lo, range.hi);
      out.data.points(i, j) = v;
      // Strict inequality: the exact midpoint is "not large".
      out.attributes(i, j) = v > range.midpoint() ? 1 : -1;
    }
    out.data.labels[i] = airis_class_rule(AirisParams::from_vector(out.data.points.row(i)));
  }
  return out;
}

}  // namespace dba
