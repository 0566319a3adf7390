#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace beamsel {

/// Arbitrary-precision integer and reduced rational.
using ExactInteger = boost::multiprecision::cpp_int;
using ExactRational = boost::multiprecision::cpp_rational;

ExactInteger binomial(int n, int k);

/// C(R_sel, N_s)^U. Throws ConfigError unless 1 <= N_s <= R_sel and U >= 1.
ExactInteger n_iter_exhaustive(int r_sel, int n_s, int users);

/// sum_{m=1}^{N_s} (R_sel - m + 1)^U
ExactInteger n_iter_greedy_direct(int r_sel, int n_s, int users);

/// Bernoulli number B_j with B_1 = -1/2, from
/// sum_{k=0}^{n} C(n+1, k) B_k = 0.
ExactRational bernoulli(int j);

/// Faulhaber form of sum_{t=0}^{n-1} t^p:
/// 1/(p+1) * sum_{j=0}^{p} C(p+1, j) B_j n^(p+1-j), B_1 = -1/2.
ExactRational faulhaber_sum(int n, int p);

/**
 * Greedy count through the binomial expansion of (R_sel - (m-1))^U:
 *   sum_{i=0}^{U} C(U,i) R_sel^(U-i) (-1)^i sum_{m=1}^{N_s} (m-1)^i
 * with the inner power sum in Faulhaber form. Equals n_iter_greedy_direct.
 */
ExactInteger n_iter_greedy_closed(int r_sel, int n_s, int users);

/// n_iter_exhaustive / n_iter_greedy_direct, divided in exact arithmetic.
double gain_ratio_exact(int r_sel, int n_s, int users);

/**
 * The Stirling form of the gain ratio: every factorial in C(R_sel, N_s)
 * replaced by sqrt(2 pi n)(n/e)^n; denominator
 *   sum_i U^i/i! R_sel^(U-i) (-1)^i (N_s^(i+1) - (i+1)/2 N_s^i) / (i+1)
 * i.e. the power sums truncated after B_0 and B_1.
 * Throws ConfigError unless 1 <= N_s < R_sel.
 */
double gain_ratio_stirling(int r_sel, int n_s, int users);

}  // namespace beamsel
