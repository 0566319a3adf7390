#include <doctest.h>

#include <cmath>

#include "beamsel/analytics.hpp"
#include "beamsel/errors.hpp"
#include "oracles.hpp"

using namespace beamsel;

namespace {

ExactInteger power(int base, int exp) {
  ExactInteger r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

TEST_CASE("binomial") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(10, 0) == 1);
  CHECK(binomial(10, 10) == 1);
  CHECK(binomial(60, 30) == ExactInteger("118264581564861424"));
}

TEST_CASE("iteration counts: worked examples") {
  CHECK(n_iter_exhaustive(4, 2, 5) == 7776);
  CHECK(n_iter_exhaustive(5, 2, 5) == 100000);
  CHECK(n_iter_exhaustive(6, 3, 5) == 3200000);
  CHECK(n_iter_greedy_direct(4, 2, 5) == 1267);
  CHECK(n_iter_greedy_direct(5, 2, 5) == 4149);
  CHECK(n_iter_greedy_direct(5, 3, 5) == 4392);
  CHECK(n_iter_greedy_direct(6, 3, 5) == 11925);
  CHECK(n_iter_greedy_closed(6, 3, 5) == 11925);
  // Large exponents stay exact.
  CHECK(n_iter_exhaustive(40, 20, 8) == pow(binomial(40, 20), 8));
}

TEST_CASE("closed-form greedy count equals the direct sum") {
  for (int r = 1; r <= 12; ++r)
    for (int n_s = 1; n_s <= r; ++n_s)
      for (int u = 1; u <= 10; ++u) {
        CAPTURE(r);
        CAPTURE(n_s);
        CAPTURE(u);
        CHECK(n_iter_greedy_closed(r, n_s, u) == n_iter_greedy_direct(r, n_s, u));
      }
}

TEST_CASE("direct greedy count against an explicit sum") {
  for (int r = 1; r <= 8; ++r)
    for (int n_s = 1; n_s <= r; ++n_s)
      for (int u = 1; u <= 6; ++u) {
        ExactInteger s = 0;
        for (int m = 1; m <= n_s; ++m) s += power(r - m + 1, u);
        CHECK(n_iter_greedy_direct(r, n_s, u) == s);
      }
}

TEST_CASE("count domain errors") {
  CHECK_THROWS_AS(n_iter_exhaustive(4, 0, 5), ConfigError);
  CHECK_THROWS_AS(n_iter_exhaustive(4, 5, 5), ConfigError);
  CHECK_THROWS_AS(n_iter_exhaustive(4, 2, 0), ConfigError);
  CHECK_THROWS_AS(n_iter_greedy_direct(3, 4, 2), ConfigError);
  CHECK_THROWS_AS(n_iter_greedy_closed(3, 0, 2), ConfigError);
  CHECK_THROWS_AS(gain_ratio_stirling(4, 4, 5), ConfigError);
  CHECK_THROWS_AS(gain_ratio_stirling(4, 0, 5), ConfigError);
}

TEST_CASE("Bernoulli numbers") {
  CHECK(bernoulli(0) == 1);
  CHECK(bernoulli(1) == ExactRational(-1, 2));
  CHECK(bernoulli(2) == ExactRational(1, 6));
  CHECK(bernoulli(4) == ExactRational(-1, 30));
  CHECK(bernoulli(6) == ExactRational(1, 42));
  CHECK(bernoulli(8) == ExactRational(-1, 30));
  CHECK(bernoulli(10) == ExactRational(5, 66));
  CHECK(bernoulli(12) == ExactRational(-691, 2730));
  CHECK(bernoulli(14) == ExactRational(7, 6));
  CHECK(bernoulli(16) == ExactRational(-3617, 510));
  CHECK(bernoulli(18) == ExactRational(43867, 798));
  CHECK(bernoulli(20) == ExactRational(-174611, 330));
  for (int j = 3; j <= 20; j += 2) CHECK(bernoulli(j) == 0);
  for (int j = 0; j <= 30; ++j) {
    CAPTURE(j);
    CHECK(bernoulli(j) == oracle::bernoulli(j));
  }
}

TEST_CASE("Faulhaber power sums") {
  for (int n = 0; n <= 15; ++n)
    for (int p = 0; p <= 10; ++p) {
      ExactInteger s = 0;
      for (int t = 0; t < n; ++t) s += (t == 0 && p == 0) ? ExactInteger(1) : power(t, p);
      CAPTURE(n);
      CAPTURE(p);
      CHECK(faulhaber_sum(n, p) == ExactRational(s));
    }
}

TEST_CASE("gain ratios") {
  CHECK(gain_ratio_exact(4, 2, 5) == doctest::Approx(7776.0 / 1267.0).epsilon(1e-15));
  CHECK(gain_ratio_exact(8, 2, 3) == doctest::Approx(21952.0 / 855.0).epsilon(1e-15));
  CHECK(gain_ratio_exact(6, 3, 5) == doctest::Approx(3200000.0 / 11925.0).epsilon(1e-15));
  // Reference value computed independently in double precision from the
  // closed Stirling expression.
  CHECK(gain_ratio_stirling(8, 2, 3) == doctest::Approx(41.85036647885327).epsilon(1e-12));
  CHECK(std::isfinite(gain_ratio_stirling(20, 4, 5)));
  CHECK(gain_ratio_stirling(20, 4, 5) > 0.0);
}

TEST_CASE("exact gain grows with U and with R_sel") {
  for (int r = 3; r <= 8; ++r)
    for (int n_s = 2; n_s < r; ++n_s)
      for (int u = 1; u < 8; ++u)
        CHECK(gain_ratio_exact(r, n_s, u + 1) > gain_ratio_exact(r, n_s, u));
  for (int u = 2; u <= 6; ++u)
    for (int r = 3; r < 10; ++r) CHECK(gain_ratio_exact(r + 1, 2, u) > gain_ratio_exact(r, 2, u));
}
