#include <doctest.h>

#include <cmath>
#include <limits>

#include "dba/classifiers.hpp"
#include "dba/datagen.hpp"
#include "dba/standardizer.hpp"

TEST_CASE("noise-free moons lie exactly on their arcs") {
  const auto d = dba::gen_moons(1000, 0.0, 4);
  int class_a = 0;
  for (int i = 0; i < d.n(); ++i) {
    const double x = d.points(i, 0);
    const double y = d.points(i, 1);
    if (d.labels[i] == 1) {
      ++class_a;
      CHECK(std::abs(x * x + y * y - 1.0) < 1e-12);
      CHECK(y >= 0.0);
    } else {
      const double u = 1.0 - x;
      const double v = 0.5 - y;
      CHECK(std::abs(u * u + v * v - 1.0) < 1e-12);
    }
  }
  CHECK(class_a == 500);
}

TEST_CASE("moons are deterministic per seed and balanced within one") {
  const auto a = dba::gen_moons(1000, 0.15, 7);
  const auto b = dba::gen_moons(1000, 0.15, 7);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  const auto c = dba::gen_moons(1001, 0.15, 7);
  const auto balance = (c.labels.array() == 1).count();
  CHECK(std::abs(2 * balance - 1001) <= 1);
}

TEST_CASE("noise-free arcs are separated by a positive margin") {
  const auto d = dba::gen_moons(600, 0.0, 10);
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d.n(); ++i)
    for (int j = 0; j < d.n(); ++j)
      if (d.labels[i] == 1 && d.labels[j] == -1)
        min_gap = std::min(min_gap, (d.points.row(i) - d.points.row(j)).norm());
  CHECK(min_gap > 0.1);

  // The gap lets a narrow kernel classifier label the training set perfectly.
  dba::KernelSmootherClassifier f(d.points, d.labels, 0.1);
  for (int i = 0; i < d.n(); ++i)
    REQUIRE(f.label(d.points.row(i).transpose()) == d.labels[i]);
}

TEST_CASE("class rule by direct substitution") {
  // 0.33*(0.5+0.4+0.45) = 0.4455 < 0.5 and 0.33*(0.5+0.4+0.5) = 0.462 > 0.4
  CHECK(dba::airis_class_rule({0.5, 0.4, 0.5, 0.4, 0.45}) == 1);
  // first holds (0.165 < 0.5) but second fails (0.231 < 0.4)
  CHECK(dba::airis_class_rule({0.3, 0.1, 0.3, 0.4, 0.1}) == -1);
}

TEST_CASE("uniform sampling yields roughly 47.4% class A") {
  const auto airis = dba::gen_airis_tab(40000, 123);
  const double frac =
      static_cast<double>((airis.data.labels.array() == 1).count()) / airis.data.n();
  CHECK(frac == doctest::Approx(0.4743).epsilon(0.043));  // within about 2 points
}

TEST_CASE("generated rows agree with the class rule and attribute convention") {
  const auto airis = dba::gen_airis_tab(4000, 42);
  const auto& ranges = dba::airis_ranges();
  for (int i = 0; i < airis.data.n(); ++i) {
    const auto p = dba::AirisParams::from_vector(airis.data.points.row(i));
    CHECK(airis.data.labels[i] == dba::airis_class_rule(p));
    for (int j = 0; j < 5; ++j) {
      const bool large = airis.data.points(i, j) > ranges[static_cast<std::size_t>(j)].midpoint();
      CHECK(airis.attributes(i, j) == (large ? 1 : -1));
    }
    for (int j = 0; j < 5; ++j) {
      CHECK(airis.data.points(i, j) >= ranges[static_cast<std::size_t>(j)].lo);
      CHECK(airis.data.points(i, j) <= ranges[static_cast<std::size_t>(j)].hi);
    }
  }
  const auto again = dba::gen_airis_tab(4000, 42);
  CHECK((again.data.points - airis.data.points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardized hyperplanes match the published coefficients") {
  const auto [h1, h2] = dba::standardized_hyperplanes();

  // 0.33 * (0.7-0.3)/sqrt(12) = 0.0381, printed as 0.038.
  CHECK(h1.coefficients[0] == doctest::Approx(0.038).epsilon(0.01));
  CHECK(h1.coefficients[1] == doctest::Approx(0.057).epsilon(0.01));
  CHECK(h1.coefficients[2] == 0.0);
  CHECK(h1.coefficients[3] == 0.0);
  CHECK(h1.coefficients[4] == doctest::Approx(0.067).epsilon(0.01));
  CHECK(h1.threshold == doctest::Approx(0.0545).epsilon(1e-9));
  CHECK(h1.class_side == dba::PlaneSide::Below);

  CHECK(h2.coefficients[0] == doctest::Approx(0.038).epsilon(0.01));
  CHECK(h2.coefficients[1] == doctest::Approx(0.057).epsilon(0.01));
  CHECK(h2.coefficients[2] == doctest::Approx(0.038).epsilon(0.01));
  CHECK(h2.coefficients[3] == 0.0);
  CHECK(h2.coefficients[4] == 0.0);
  CHECK(h2.threshold == doctest::Approx(-0.062).epsilon(1e-9));
  CHECK(h2.class_side == dba::PlaneSide::Above);

  // Exact uniform-sd reconstruction.
  const double sd_pl = 0.4 / std::sqrt(12.0);
  CHECK(h1.coefficients[0] == doctest::Approx(0.33 * sd_pl).epsilon(1e-12));
}

TEST_CASE("standardized rule reproduces raw labels") {
  const auto airis = dba::gen_airis_tab(4000, 5);
  const auto standardizer = dba::fit_standardizer(airis.data);

  // Oracle equivalence needs the exact uniform moments, not the sample ones.
  dba::Standardizer exact;
  exact.means.resize(5);
  exact.sds.resize(5);
  const auto& ranges = dba::airis_ranges();
  for (int j = 0; j < 5; ++j) {
    exact.means[j] = ranges[static_cast<std::size_t>(j)].mean();
    exact.sds[j] = ranges[static_cast<std::size_t>(j)].sd();
  }
  const auto [h1, h2] = dba::standardized_hyperplanes();
  const auto [r1, r2] = dba::raw_hyperplanes();
  int checked = 0;
  for (int i = 0; i < airis.data.n(); ++i) {
    const Eigen::VectorXd x = airis.data.points.row(i).transpose();
    const Eigen::VectorXd s = exact.apply(x);
    // Skip points within float rounding of either plane.
    if (std::abs(h1.coefficients.dot(s) - h1.threshold) < 1e-9) continue;
    if (std::abs(h2.coefficients.dot(s) - h2.threshold) < 1e-9) continue;
    const int via_std = (h1.satisfied(s) && h2.satisfied(s)) ? 1 : -1;
    CHECK(via_std == airis.data.labels[i]);
    ++checked;
    // The raw planes restate the rule verbatim.
    CHECK(((r1.satisfied(x) && r2.satisfied(x)) ? 1 : -1) == airis.data.labels[i]);
  }
  CHECK(checked > 3900);
  // Sample standardizer stays close to the exact one.
  CHECK((standardizer.means - exact.means).cwiseAbs().maxCoeff() < 0.02);
}
