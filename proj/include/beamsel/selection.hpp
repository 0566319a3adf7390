#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "beamsel/beamspace.hpp"
#include "beamsel/channel.hpp"

namespace beamsel {

/// Default cap on exhaustive search size, in combinations.
inline constexpr std::uint64_t kDefaultSearchBudget = 10'000'000;

/// Channel-gain threshold schedule: one gamma per greedy iteration, or a
/// single value applied everywhere. Every gamma lies in (0, 1).
class GainConstraint {
public:
  explicit GainConstraint(double gamma);
  explicit GainConstraint(std::vector<double> schedule);

  /// Gamma for 1-based greedy iteration m. A single-value constraint
  /// answers every m; a schedule must cover m.
  double gamma(int m = 1) const;
  std::size_t schedule_length() const noexcept { return gammas_.size(); }
  bool uniform() const noexcept { return gammas_.size() == 1; }

private:
  std::vector<double> gammas_;
};

struct SelectionResult {
  IndexSelection selection;
  CMatrix f_io;
  CMatrix w_io;
  double objective_value = 0.0;
  std::uint64_t combinations_evaluated = 0;
  std::chrono::nanoseconds elapsed{0};
  bool feasible = true;
};

/// Extracts the selected candidate columns into F_io / W_io and fills in
/// objective_value. Counters and timing are left for the caller.
SelectionResult assemble_result(const CandidateBeams& cand, IndexSelection sel);

/// Exhaustive sum-rate maximization over every per-user N_s-subset of the
/// candidates. Ties go to the lexicographically smallest index vector.
/// Throws BudgetError above `budget` combinations.
SelectionResult svbs(const ChannelSet& channels, const CandidateBeams& cand, int n_s,
                     double noise_power, double tx_power = 1.0,
                     std::uint64_t budget = kDefaultSearchBudget);

/**
 * Exhaustive interference minimization.
 *
 * Among per-user N_s-subsets whose gain sum exceeds gamma times the sum of
 * each user's top N_s singular values, returns the one with the smallest
 * correlation objective (ties: larger gain sum, then lexicographic index
 * order). With no feasible subset, returns the maximum-gain subset and
 * feasible = false.
 */
SelectionResult iosvb(const CandidateBeams& cand, int n_s, const GainConstraint& constraint,
                      std::uint64_t budget = kDefaultSearchBudget);

/**
 * Greedy interference minimization.
 *
 * N_s rounds; round m tries every way to add one unused column per user
 * ((R_sel - m + 1)^U tuples) and keeps the tuple minimizing the objective
 * over everything selected so far, subject to
 *   tuple gain > gamma_m * sum_k (largest unused singular value of user k).
 * Infeasible rounds fall back to the max-gain tuple and clear `feasible`.
 */
SelectionResult g_iosvb(const CandidateBeams& cand, int n_s, const GainConstraint& gammas);

}  // namespace beamsel
