#include <benchmark/benchmark.h>

#include "dba/classifiers.hpp"
#include "dba/datagen.hpp"
#include "dba/dba_tab.hpp"
#include "dba/glm.hpp"
#include "dba/standardizer.hpp"

namespace {

struct AirisBench {
  dba::Dataset train;
  dba::Standardizer standardizer;
  Eigen::MatrixXd test;

  AirisBench() {
    const auto raw = dba::gen_airis_tab(4000, 1);
    standardizer = dba::fit_standardizer(raw.data);
    train.points = standardizer.apply_rows(raw.data.points);
    train.labels = raw.data.labels;
    train.feature_names = raw.data.feature_names;
    const auto test_raw = dba::gen_airis_tab(64, 2);
    test = standardizer.apply_rows(test_raw.data.points);
  }
};

const AirisBench& airis() {
  static const AirisBench bench;
  return bench;
}

void bm_bisection(benchmark::State& state) {
  const auto& fx = airis();
  const dba::AirisRuleClassifier f(fx.standardizer);
  const Eigen::VectorXd a = fx.test.row(0).transpose();
  Eigen::Index opposite = 0;
  const int fa = f.label(a);
  for (Eigen::Index i = 0; i < fx.train.n(); ++i)
    if (f.label(fx.train.points.row(i).transpose()) != fa) {
      opposite = i;
      break;
    }
  const Eigen::VectorXd b = fx.train.points.row(opposite).transpose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dba::bisect_boundary(f, a, b, 1e-4, 60));
  }
}
BENCHMARK(bm_bisection);

void bm_detect(benchmark::State& state) {
  const auto& fx = airis();
  const dba::AirisRuleClassifier f(fx.standardizer);
  dba::DbaParams params;
  params.k = static_cast<int>(state.range(0));
  const Eigen::VectorXd x0 = fx.test.row(1).transpose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dba::detect(fx.train, x0, f, params));
  }
}
BENCHMARK(bm_detect)->Arg(100)->Arg(1000);

void bm_simulate(benchmark::State& state) {
  const auto& fx = airis();
  const dba::AirisRuleClassifier f(fx.standardizer);
  dba::DbaParams params;
  params.k = 100;
  const Eigen::VectorXd x0 = fx.test.row(2).transpose();
  const auto detection = dba::detect(fx.train, x0, f, params);
  const Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(5, 5);
  dba::CounterRng rng(3, "bench-sim");
  for (auto _ : state) {
    benchmark::DoNotOptimize(dba::simulate(f, detection.boundary_point, x0, 0.5,
                                           static_cast<int>(state.range(0)), basis, rng));
  }
}
BENCHMARK(bm_simulate)->Arg(500)->Arg(5000);

void bm_fit_logistic(benchmark::State& state) {
  const auto& fx = airis();
  const dba::AirisRuleClassifier f(fx.standardizer);
  dba::DbaParams params;
  params.k = 100;
  const Eigen::VectorXd x0 = fx.test.row(3).transpose();
  const auto detection = dba::detect(fx.train, x0, f, params);
  dba::CounterRng rng(4, "bench-fit");
  const auto sample = dba::simulate(f, detection.boundary_point, x0, 0.5,
                                    static_cast<int>(state.range(0)),
                                    Eigen::MatrixXd::Identity(5, 5), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dba::fit_logistic(sample.points, sample.labels, 0.0));
  }
}
BENCHMARK(bm_fit_logistic)->Arg(500)->Arg(2000);

void bm_tune_and_explain(benchmark::State& state) {
  const auto& fx = airis();
  const dba::AirisRuleClassifier f(fx.standardizer);
  dba::DbaParams params;
  params.k = 1000;
  params.m = 500;
  const Eigen::VectorXd x0 = fx.test.row(4).transpose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dba::tune_and_explain(fx.train, x0, f, params, dba::CounterRng(5, "bench")));
  }
}
BENCHMARK(bm_tune_and_explain)->Unit(benchmark::kMillisecond);

void bm_kernel_smoother_query(benchmark::State& state) {
  const auto moons = dba::gen_moons(600, 0.15, 6);
  const dba::KernelSmootherClassifier f(moons.points, moons.labels, 0.3);
  const Eigen::VectorXd x = moons.points.row(0).transpose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.probability(x));
  }
}
BENCHMARK(bm_kernel_smoother_query);

}  // namespace

BENCHMARK_MAIN();
