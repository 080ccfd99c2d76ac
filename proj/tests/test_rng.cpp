#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/rng.hpp"

using rq::Rng;

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next();
    all_equal = all_equal && va == b.next();
    any_diff = any_diff || va != c.next();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1) with sane moments") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // 3 sigma bands for mean 1/2 and variance 1/12
  CHECK(std::fabs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::fabs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal has unit variance and zero mean") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("below covers the range uniformly") {
  Rng rng(3);
  const std::uint64_t n = 10;
  std::vector<int> counts(n, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[rng.below(n)];
  const double expected = static_cast<double>(draws) / n;
  const double band = 3.0 * std::sqrt(expected * (1.0 - 1.0 / n));
  for (auto c : counts) CHECK(std::fabs(c - expected) < band);
}

TEST_CASE("bernoulli frequency tracks p") {
  Rng rng(5);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.1) ? 1 : 0;
  const double p_hat = static_cast<double>(hits) / n;
  CHECK(std::fabs(p_hat - 0.1) < 3.0 * std::sqrt(0.1 * 0.9 / n));
  // degenerate probabilities never fire / always fire
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("derived streams are independent of sibling consumption") {
  Rng a = Rng::derive(99, {rq::stream::kTrainEnv});
  Rng b = Rng::derive(99, {rq::stream::kExplore});
  Rng a2 = Rng::derive(99, {rq::stream::kTrainEnv});
  (void)b.next();
  (void)b.next();
  bool equal = true;
  for (int i = 0; i < 100; ++i) equal = equal && a.next() == a2.next();
  CHECK(equal);

  Rng c1 = Rng::derive(99, {rq::stream::kSweepCell, 1, 2, 3});
  Rng c2 = Rng::derive(99, {rq::stream::kSweepCell, 1, 2, 4});
  CHECK(c1.next() != c2.next());
}
