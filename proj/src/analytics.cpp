#include "beamsel/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "beamsel/errors.hpp"

namespace beamsel {

namespace {

void check_domain(int r_sel, int n_s, int users) {
  if (users < 1 || n_s < 1 || r_sel < 1 || n_s > r_sel) {
    throw ConfigError("iteration count: need 1 <= N_s <= R_sel and U >= 1 (got R_sel=" +
                      std::to_string(r_sel) + ", N_s=" + std::to_string(n_s) +
                      ", U=" + std::to_string(users) + ")");
  }
}

ExactInteger ipow(const ExactInteger& base, int exp) {
  return boost::multiprecision::pow(base, static_cast<unsigned>(exp));
}

std::vector<ExactRational> bernoulli_table(int up_to) {
  std::vector<ExactRational> b(static_cast<std::size_t>(up_to) + 1);
  b[0] = 1;
  for (int n = 1; n <= up_to; ++n) {
    ExactRational acc = 0;
    for (int k = 0; k < n; ++k) acc += ExactRational(binomial(n + 1, k)) * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(n)] = -acc / ExactRational(n + 1);
  }
  return b;
}

double stirling_factorial(double n) {
  return std::sqrt(2.0 * std::numbers::pi * n) * std::pow(n / std::numbers::e, n);
}

}  // namespace

ExactInteger binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  ExactInteger r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

ExactInteger n_iter_exhaustive(int r_sel, int n_s, int users) {
  check_domain(r_sel, n_s, users);
  return ipow(binomial(r_sel, n_s), users);
}

ExactInteger n_iter_greedy_direct(int r_sel, int n_s, int users) {
  check_domain(r_sel, n_s, users);
  ExactInteger total = 0;
  for (int m = 1; m <= n_s; ++m) total += ipow(ExactInteger(r_sel - m + 1), users);
  return total;
}

ExactRational bernoulli(int j) {
  if (j < 0) throw ConfigError("bernoulli: index must be >= 0");
  return bernoulli_table(j).back();
}

ExactRational faulhaber_sum(int n, int p) {
  if (n < 0 || p < 0) throw ConfigError("faulhaber: arguments must be >= 0");
  const auto b = bernoulli_table(p);
  ExactRational acc = 0;
  for (int j = 0; j <= p; ++j) {
    acc += ExactRational(binomial(p + 1, j)) * b[static_cast<std::size_t>(j)] *
           ExactRational(ipow(ExactInteger(n), p + 1 - j));
  }
  return acc / ExactRational(p + 1);
}

ExactInteger n_iter_greedy_closed(int r_sel, int n_s, int users) {
  check_domain(r_sel, n_s, users);
  ExactRational total = 0;
  for (int i = 0; i <= users; ++i) {
    // sum_{m=1}^{N_s} (m-1)^i, with 0^0 = 1.
    const ExactRational power_sum = faulhaber_sum(n_s, i);
    ExactRational term = ExactRational(binomial(users, i) * ipow(ExactInteger(r_sel), users - i)) *
                         power_sum;
    total += (i % 2 == 0) ? term : -term;
  }
  if (boost::multiprecision::denominator(total) != 1) {
    throw NumericalError("greedy closed form did not reduce to an integer");
  }
  return boost::multiprecision::numerator(total);
}

double gain_ratio_exact(int r_sel, int n_s, int users) {
  const ExactRational ratio(n_iter_exhaustive(r_sel, n_s, users),
                            n_iter_greedy_direct(r_sel, n_s, users));
  return ratio.convert_to<double>();
}

double gain_ratio_stirling(int r_sel, int n_s, int users) {
  if (users < 1 || n_s < 1 || n_s >= r_sel) {
    throw ConfigError("stirling gain: need 1 <= N_s < R_sel and U >= 1");
  }
  const double r = r_sel;
  const double s = n_s;
  const double binom = stirling_factorial(r) / (stirling_factorial(s) * stirling_factorial(r - s));
  const double numerator = std::pow(binom, users);

  double denominator = 0.0;
  double u_pow_over_fact = 1.0;  // U^i / i!
  for (int i = 0; i <= users; ++i) {
    if (i > 0) u_pow_over_fact *= static_cast<double>(users) / i;
    const double bracket = (std::pow(s, i + 1) - 0.5 * (i + 1) * std::pow(s, i)) / (i + 1);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    denominator += u_pow_over_fact * std::pow(r, users - i) * sign * bracket;
  }
  const double ratio = numerator / denominator;
  if (!std::isfinite(ratio)) throw NumericalError("stirling gain: non-finite result");
  return ratio;
}

}  // namespace beamsel
