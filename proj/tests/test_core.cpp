#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "dba/csv.hpp"
#include "dba/datagen.hpp"
#include "dba/rng.hpp"
#include "dba/standardizer.hpp"

namespace {

// Temporary file that cleans up after itself.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/dba_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream out(path);
    out << content;
  }
};

}  // namespace

TEST_CASE("load_dataset maps a {0,1} label column onto {-1,+1}") {
  TempFile file("basic.csv");
  file.write("a,b,label\n1.0,2.0,0\n3.0,4.0,1\n5.0,6.0,0\n");
  const auto loaded = dba::load_dataset(file.path, "label");
  CHECK(loaded.data.n() == 3);
  CHECK(loaded.data.dim() == 2);
  CHECK(loaded.data.labels[0] == -1);
  CHECK(loaded.data.labels[1] == 1);
  CHECK(loaded.data.labels[2] == -1);
  CHECK(loaded.label_mapping.negative == "0");
  CHECK(loaded.label_mapping.positive == "1");
  CHECK(loaded.data.feature_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("load_dataset names the offending cell on parse errors") {
  TempFile file("bad.csv");
  file.write("a,b,label\n1.0,2.0,0\n3.0,oops,1\n");
  CHECK_THROWS_WITH_AS(dba::load_dataset(file.path, "label"),
                       doctest::Contains("row 2"), std::runtime_error);
  try {
    dba::load_dataset(file.path, "label");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
}

TEST_CASE("load_dataset rejects missing files and single-class labels") {
  CHECK_THROWS_AS(dba::load_dataset("/tmp/definitely_not_here.csv", "label"),
                  std::runtime_error);
  TempFile file("oneclass.csv");
  file.write("a,label\n1.0,1\n2.0,1\n");
  CHECK_THROWS_WITH_AS(dba::load_dataset(file.path, "label"),
                       doctest::Contains("distinct"), std::runtime_error);
}

TEST_CASE("mixed binary and continuous columns survive a write/read round trip") {
  // Heart-disease-like shape: continuous plus binary columns.
  dba::Dataset d;
  dba::CounterRng rng(11, "roundtrip");
  d.points.resize(40, 4);
  d.labels.resize(40);
  d.feature_names = {"age", "chol", "sex", "fbs"};
  for (int i = 0; i < 40; ++i) {
    d.points(i, 0) = rng.uniform(29.0, 77.0);
    d.points(i, 1) = rng.uniform(120.0, 400.0);
    d.points(i, 2) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    d.points(i, 3) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    d.labels[i] = i % 3 == 0 ? 1 : -1;
  }
  TempFile file("heart.csv");
  dba::write_dataset_csv(file.path, d, "target");
  const auto loaded = dba::load_dataset(file.path, "target");
  REQUIRE(loaded.data.n() == d.n());
  REQUIRE(loaded.data.dim() == d.dim());
  CHECK((loaded.data.points - d.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.data.labels - d.labels).cwiseAbs().maxCoeff() == 0);
  CHECK(loaded.data.feature_names == d.feature_names);
}

TEST_CASE("label mapping is stable across reloads") {
  TempFile file("mapping.csv");
  file.write("a,label\n1.0,B\n2.0,A\n3.0,B\n");
  const auto first = dba::load_dataset(file.path, "label");
  const auto second = dba::load_dataset(file.path, "label");
  CHECK(first.label_mapping.negative == "A");
  CHECK(first.label_mapping.positive == "B");
  CHECK(second.label_mapping.negative == first.label_mapping.negative);
  CHECK((first.data.labels - second.data.labels).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("attribute columns split off by prefix") {
  TempFile file("atts.csv");
  file.write("a,b,label,att_big\n1.0,2.0,0,1\n3.0,4.0,1,-1\n2.0,1.0,0,0\n");
  const auto loaded = dba::load_dataset(file.path, "label", "att_");
  CHECK(loaded.data.dim() == 2);
  REQUIRE(loaded.attributes.cols() == 1);
  CHECK(loaded.attributes(0, 0) == 1);
  CHECK(loaded.attributes(1, 0) == -1);
  CHECK(loaded.attributes(2, 0) == -1);  // 0 maps to -1
  CHECK(loaded.attribute_names == std::vector<std::string>{"att_big"});
}

TEST_CASE("separate annotation files align by row count") {
  TempFile file("annot.csv");
  file.write("big,red\n1,-1\n-1,1\n1,1\n");
  const auto [values, names] = dba::load_annotations(file.path, 3);
  CHECK(names == std::vector<std::string>{"big", "red"});
  CHECK(values(0, 0) == 1);
  CHECK(values(1, 1) == 1);
  CHECK_THROWS_AS(dba::load_annotations(file.path, 5), std::runtime_error);

  TempFile bad("annot_bad.csv");
  bad.write("big\n2\n1\n");
  CHECK_THROWS_AS(dba::load_annotations(bad.path, 2), std::runtime_error);
}

TEST_CASE("two-point column standardizes to mean 1, sd 1") {
  dba::Dataset d;
  d.points.resize(2, 1);
  d.points << 0.0, 2.0;
  d.labels.resize(2);
  d.labels << -1, 1;
  const auto s = dba::fit_standardizer(d);
  CHECK(s.means[0] == doctest::Approx(1.0));
  CHECK(s.sds[0] == doctest::Approx(1.0));  // population convention
}

TEST_CASE("uniform color parameter has sd near 0.202") {
  const auto airis = dba::gen_airis_tab(20000, 99);
  const auto s = dba::fit_standardizer(airis.data);
  CHECK(s.sds[4] == doctest::Approx(0.202).epsilon(0.02));
}

TEST_CASE("constant column fails with its name") {
  dba::Dataset d;
  d.points.resize(3, 2);
  d.points << 1.0, 5.0, 2.0, 5.0, 3.0, 5.0;
  d.labels.resize(3);
  d.labels << -1, 1, -1;
  d.feature_names = {"ok", "flat"};
  CHECK_THROWS_WITH_AS(dba::fit_standardizer(d), doctest::Contains("flat"),
                       std::invalid_argument);
}

TEST_CASE("apply maps means to zero and means+sds to ones") {
  dba::CounterRng rng(5, "std");
  dba::Dataset d;
  d.points.resize(50, 3);
  d.labels.resize(50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 3; ++j) d.points(i, j) = rng.uniform(-4.0, 9.0);
    d.labels[i] = i % 2 == 0 ? 1 : -1;
  }
  const auto s = dba::fit_standardizer(d);
  CHECK(s.apply(s.means).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.apply(s.means + s.sds) - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-12);

  // Round trip within 1e-12 relative error.
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform(-100.0, 100.0);
    const Eigen::VectorXd back = s.inverse(s.apply(x));
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(back[j] - x[j]) <= 1e-12 * std::max(1.0, std::abs(x[j])));
  }

  // Transformed training columns are centered and unit-scale.
  const Eigen::MatrixXd Z = s.apply_rows(d.points);
  CHECK(Z.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  CHECK((Z.array().square().colwise().mean().sqrt() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("standardizer length mismatch throws") {
  dba::Standardizer s;
  s.means = Eigen::VectorXd::Zero(3);
  s.sds = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(s.apply(Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("standardizer JSON round trip") {
  dba::Standardizer s;
  s.means = Eigen::VectorXd::LinSpaced(4, 0.5, 2.0);
  s.sds = Eigen::VectorXd::LinSpaced(4, 1.0, 1.6);
  s.feature_names = {"a", "b", "c", "d"};
  const auto back = dba::Standardizer::from_json(s.to_json());
  CHECK((back.means - s.means).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.sds - s.sds).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.feature_names == s.feature_names);
}
