#include <doctest.h>

#include <cmath>

#include "alssm/rng.hpp"
#include "oracles.hpp"

using namespace alssm;

TEST_CASE("rng: identical seeds give bit-identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42), d(43);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += c.next_u64() == d.next_u64();
  CHECK(same == 0);
}

TEST_CASE("rng: split streams are independent of draw order") {
  Rng root(7);
  Rng s1 = root.split(1);
  Rng s2 = root.split(2);
  double first_of_s2 = s2.uniform();
  // Drawing from s1 must not perturb s2.
  Rng s1b = root.split(1);
  Rng s2b = root.split(2);
  for (int i = 0; i < 100; ++i) (void)s1b.uniform();
  CHECK(s2b.uniform() == first_of_s2);
  (void)s1;
}

TEST_CASE("rng: uniform moments") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("rng: normal and gamma moments") {
  Rng rng(13);
  const int n = 400000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.01);

  double gsum = 0.0, gsum2 = 0.0;
  const double shape = 2.5, rate = 1.5;
  for (int i = 0; i < n; ++i) {
    double g = rng.gamma(shape, rate);
    gsum += g;
    gsum2 += g * g;
  }
  double mean = gsum / n;
  double var = gsum2 / n - mean * mean;
  CHECK(std::abs(mean - shape / rate) < 0.02);
  CHECK(std::abs(var - shape / (rate * rate)) < 0.05);
}

TEST_CASE("rng: inverse gaussian matches its closed moments") {
  Rng rng(17);
  const int n = 400000;
  const double mu = 1.7, lam = 2.3;
  double sum = 0.0, sum_inv = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.inverse_gaussian(mu, lam);
    sum += x;
    sum_inv += 1.0 / x;
  }
  CHECK(std::abs(sum / n - mu) < 0.02);
  CHECK(std::abs(sum_inv / n - (1.0 / mu + 1.0 / lam)) < 0.02);
}
