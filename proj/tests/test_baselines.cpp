#include <doctest.h>

#include <cmath>

#include "dba/baselines.hpp"
#include "dba/classifiers.hpp"
#include "dba/datagen.hpp"
#include "dba/standardizer.hpp"

namespace {

// Probability exactly linear in x within the sampled region.
class LinearProbabilityClassifier final : public dba::Classifier {
 public:
  LinearProbabilityClassifier(Eigen::VectorXd w, double b) : w_(std::move(w)), b_(b) {}
  bool has_probability() const override { return true; }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& x) const override {
    return std::clamp(b_ + w_.dot(x), 0.0, 1.0);
  }
  std::string name() const override { return "linear-probability"; }

 private:
  Eigen::VectorXd w_;
  double b_;
};

}  // namespace

TEST_CASE("default kernel widths follow 0.75 sqrt(d)") {
  CHECK(dba::default_lime_sigma(5) == doctest::Approx(0.75 * std::sqrt(5.0)));
  CHECK(dba::default_lime_sigma(5) == doctest::Approx(1.677).epsilon(1e-3));
  CHECK(dba::default_lime_sigma(100) == doctest::Approx(7.5));
}

TEST_CASE("lime sampling statistics") {
  Eigen::VectorXd means(2), sds(2);
  means << 3.0, -1.0;
  sds << 2.0, 0.5;

  dba::CounterRng rng(1, "lime-clt");
  const auto big = dba::lime_sample(means, sds, 10000, rng);
  for (int j = 0; j < 2; ++j) {
    const double bound = 4.0 * sds[j] / std::sqrt(10000.0);
    CHECK(std::abs(big.col(j).mean() - means[j]) <= bound);
  }

  // Zero sd collapses onto the mean.
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(2);
  dba::CounterRng rng2(2, "lime-flat");
  const auto collapsed = dba::lime_sample(means, flat, 50, rng2);
  for (int i = 0; i < 50; ++i)
    CHECK((collapsed.row(i).transpose() - means).cwiseAbs().maxCoeff() == 0.0);

  // Seeded determinism.
  dba::CounterRng a(9, "det"), b(9, "det");
  CHECK((dba::lime_sample(means, sds, 20, a) - dba::lime_sample(means, sds, 20, b))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("lime weights formula and translation invariance") {
  Eigen::MatrixXd samples(2, 2);
  Eigen::VectorXd x0(2);
  x0 << 1.0, 2.0;
  samples.row(0) = x0.transpose();           // weight 1
  samples.row(1) << 1.0 + 1.3, 2.0;          // distance sigma -> weight exp(-1)
  const auto w = dba::lime_weights(samples, x0, 1.3);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == doctest::Approx(std::exp(-1.0)));

  Eigen::VectorXd shift(2);
  shift << -4.0, 2.5;
  const auto shifted =
      dba::lime_weights(samples.rowwise() + shift.transpose(), x0 + shift, 1.3);
  CHECK((w - shifted).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("lime recovers a locally linear probability surface") {
  Eigen::VectorXd w(3);
  w << 0.05, -0.02, 0.04;
  LinearProbabilityClassifier f(w, 0.5);
  Eigen::VectorXd means = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd sds = Eigen::VectorXd::Ones(3);
  Eigen::VectorXd x0(3);
  x0 << 0.2, -0.1, 0.0;

  dba::LimeParams params;
  params.m = 600;
  const auto result =
      dba::lime_explain(means, sds, x0, f, params, dba::CounterRng(31, "lime-lin"));
  REQUIRE(result.explanation.weighted_r2.has_value());
  CHECK(*result.explanation.weighted_r2 > 0.999);
  const double cos = result.explanation.coefficients.dot(w) /
                     (result.explanation.coefficients.norm() * w.norm());
  CHECK(cos > 0.999);
  CHECK(*result.explanation.weighted_r2 <= 1.0);
}

TEST_CASE("uniform weights reduce lime to ordinary least squares") {
  const auto moons = dba::gen_moons(100, 0.15, 41);
  dba::KernelSmootherClassifier f(moons.points, moons.labels, 0.3);
  Eigen::VectorXd means = moons.points.colwise().mean();
  Eigen::VectorXd sds =
      (moons.points.rowwise() - means.transpose()).array().square().colwise().mean().sqrt();
  Eigen::VectorXd x0 = moons.points.row(0).transpose();

  dba::LimeParams params;
  params.m = 200;
  params.sigma = 1e9;  // effectively uniform weights
  const auto wide = dba::lime_explain(means, sds, x0, f, params, dba::CounterRng(6, "ols"));

  Eigen::VectorXd targets(200);
  for (int i = 0; i < 200; ++i) targets[i] = f.probability(wide.samples.row(i).transpose());
  const auto ols = dba::fit_wls(wide.samples, targets, Eigen::VectorXd::Ones(200));
  CHECK((wide.explanation.coefficients - ols.coefficients).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("constant probabilities make R^2 undefined") {
  class Constant final : public dba::Classifier {
   public:
    bool has_probability() const override { return true; }
    double probability(const Eigen::Ref<const Eigen::VectorXd>&) const override { return 0.7; }
    std::string name() const override { return "constant"; }
  };
  Constant f;
  Eigen::VectorXd means = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd sds = Eigen::VectorXd::Ones(2);
  const auto result = dba::lime_explain(means, sds, Eigen::VectorXd::Zero(2), f, {},
                                        dba::CounterRng(3, "const"));
  CHECK_FALSE(result.explanation.weighted_r2.has_value());
  bool warned = false;
  for (const auto& w : result.explanation.warnings)
    if (w.find("undefined") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("identity codec reduces lime-att to lime-tab plus annotator mapping") {
  const auto airis = dba::gen_airis_tab(400, 55);
  const auto standardizer = dba::fit_standardizer(airis.data);
  dba::Dataset data;
  data.points = standardizer.apply_rows(airis.data.points);
  data.labels = airis.data.labels;
  dba::AirisRuleClassifier f{standardizer};

  const dba::IdentityCodec codec(5);
  std::vector<dba::Annotator> annotators;
  for (int j = 0; j < 5; ++j) {
    dba::Annotator a;
    a.theta = Eigen::VectorXd::Unit(5, j);
    a.attribute = "a" + std::to_string(j);
    annotators.push_back(std::move(a));
  }

  Eigen::VectorXd means = data.points.colwise().mean();
  Eigen::VectorXd sds =
      (data.points.rowwise() - means.transpose()).array().square().colwise().mean().sqrt();
  const Eigen::VectorXd x0 = data.points.row(0).transpose();

  dba::LimeParams params;
  params.m = 300;
  const auto att = dba::lime_att_explain(means, sds, x0, f, codec, annotators, params,
                                         dba::CounterRng(8, "att"));
  const auto tab =
      dba::lime_explain(means, sds, x0, f, params, dba::CounterRng(8, "att"));

  // Same stream, identity codec: identical Gaussian draws and weights.
  CHECK((att.latent_samples - tab.samples).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(att.latent_samples.rows() == tab.samples.rows());
  // sigma differs only through l = d, so weights agree too.
  CHECK((att.weights - tab.weights).cwiseAbs().maxCoeff() == 0.0);

  // Class balance of the latent sample sits near the training share.
  const double balance =
      static_cast<double>((att.labels.array() == 1).count()) / att.labels.size();
  CHECK(balance > 0.40);
  CHECK(balance < 0.56);
}
