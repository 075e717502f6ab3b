#include <doctest.h>

#include <cmath>
#include <vector>

#include "dba/rng.hpp"

using dba::CounterRng;

TEST_CASE("identical seed and stream reproduce the sequence") {
  CounterRng a(42, "sim");
  CounterRng b(42, "sim");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams decorrelate") {
  CounterRng a(42, "sim");
  CounterRng b(42, "detect");
  int equal = 0;
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("split streams do not depend on parent consumption") {
  CounterRng parent1(7, "root");
  CounterRng child1 = parent1.split(3);
  const double first = child1.uniform();

  CounterRng parent2(7, "root");
  for (int i = 0; i < 50; ++i) parent2.uniform();  // consume the parent
  CounterRng child2 = parent2.split(3);
  CHECK(child2.uniform() == first);
}

TEST_CASE("uniform stays in [0,1) with mean near 1/2") {
  CounterRng rng(1, "u");
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("gaussian moments") {
  CounterRng rng(2, "g");
  double sum = 0.0, sq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("exponential mean near 1") {
  CounterRng rng(3, "e");
  double sum = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double e = rng.exponential();
    REQUIRE(e >= 0.0);
    sum += e;
  }
  CHECK(std::abs(sum / n - 1.0) < 0.02);
}
