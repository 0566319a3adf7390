#include "beamsel/selection.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "beamsel/analytics.hpp"
#include "beamsel/errors.hpp"
#include "beamsel/metrics.hpp"

namespace beamsel {

namespace {

using Clock = std::chrono::steady_clock;

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> lexicographic_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

void check_streams(const CandidateBeams& cand, int n_s) {
  if (n_s < 1 || n_s > cand.r_sel()) {
    throw ConfigError("selection: N_s = " + std::to_string(n_s) + " must be in [1, R_sel = " +
                      std::to_string(cand.r_sel()) + "]");
  }
}

std::uint64_t checked_search_size(const CandidateBeams& cand, int n_s, std::uint64_t budget,
                                  const char* algo) {
  const ExactInteger size = n_iter_exhaustive(cand.r_sel(), n_s, cand.users());
  if (size > budget) {
    throw BudgetError(std::string(algo) + ": search size C(" + std::to_string(cand.r_sel()) +
                      "," + std::to_string(n_s) + ")^" + std::to_string(cand.users()) + " = " +
                      size.str() + " exceeds budget " + std::to_string(budget));
  }
  return size.convert_to<std::uint64_t>();
}

/// |C_sel(a, b)|^2 + |C_sel(b, a)|^2 = (sigma_a^2 + sigma_b^2) |<v_a, v_b>|^2
/// for columns of different users, 0 within a user. Intra-user entries
/// vanish analytically (orthonormal right singular vectors); dropping them
/// keeps single-user scores exactly zero so that gain tie-breaks apply.
/// Only the inter-user dot products are formed.
Eigen::MatrixXd pair_weights(const CandidateBeams& cand) {
  const CMatrix& f = cand.f_sel();
  const Eigen::VectorXd& s = cand.sigma();
  const int n = cand.columns();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = cand.per_user_range(cand.user_of(a)).end; b < n; ++b) {
      const double v = (s[a] * s[a] + s[b] * s[b]) * std::norm(f.col(a).dot(f.col(b)));
      w(a, b) = v;
      w(b, a) = v;
    }
  }
  return w;
}

/// Running best under the shared tie-break: smaller score, then larger
/// gain. Candidates arrive in lexicographic order, so keeping the incumbent
/// on full ties yields the lexicographically smallest winner.
struct Incumbent {
  double score = std::numeric_limits<double>::infinity();
  double gain = -std::numeric_limits<double>::infinity();
  bool found = false;

  bool offer(double s, double g) {
    if (!found || s < score || (s == score && g > gain)) {
      score = s;
      gain = g;
      found = true;
      return true;
    }
    return false;
  }
};

struct MaxGain {
  double gain = -std::numeric_limits<double>::infinity();
  bool offer(double g) {
    if (g > gain) {
      gain = g;
      return true;
    }
    return false;
  }
};

}  // namespace

GainConstraint::GainConstraint(double gamma) : GainConstraint(std::vector<double>{gamma}) {}

GainConstraint::GainConstraint(std::vector<double> schedule) : gammas_(std::move(schedule)) {
  if (gammas_.empty()) throw ConfigError("gain constraint: empty gamma schedule");
  for (double g : gammas_) {
    if (!(g > 0.0 && g < 1.0)) {
      throw ConfigError("gain constraint: gamma must lie in (0, 1), got " + std::to_string(g));
    }
  }
}

double GainConstraint::gamma(int m) const {
  if (uniform()) return gammas_.front();
  if (m < 1 || static_cast<std::size_t>(m) > gammas_.size()) {
    throw ConfigError("gain constraint: no gamma for iteration " + std::to_string(m));
  }
  return gammas_[static_cast<std::size_t>(m - 1)];
}

SelectionResult assemble_result(const CandidateBeams& cand, IndexSelection sel) {
  sel.validate(cand);
  SelectionResult r;
  const int n = sel.size();
  r.f_io.resize(cand.n_t(), n);
  r.w_io.resize(cand.n_r(), n);
  for (int a = 0; a < n; ++a) {
    const int col = sel.ind()[static_cast<std::size_t>(a)];
    r.f_io.col(a) = cand.f_sel().col(col);
    r.w_io.col(a) = cand.w_sel().col(col);
  }
  r.objective_value = objective(c_corr_for(cand, sel));
  r.selection = std::move(sel);
  return r;
}

SelectionResult svbs(const ChannelSet& channels, const CandidateBeams& cand, int n_s,
                     double noise_power, double tx_power, std::uint64_t budget) {
  const auto start = Clock::now();
  check_streams(cand, n_s);
  if (channels.num_users() != cand.users() || channels.n_t() != cand.n_t() ||
      channels.n_r() != cand.n_r()) {
    throw ConfigError("svbs: candidate beams do not match the channel set");
  }
  const std::uint64_t expected = checked_search_size(cand, n_s, budget, "svbs");
  const LinkBudget link(tx_power, noise_power);

  const int users = cand.users();
  const auto subsets = lexicographic_subsets(cand.r_sel(), n_s);
  const auto n_sub = subsets.size();

  CMatrix f(cand.n_t(), users * n_s);
  CMatrix w(cand.n_r(), users * n_s);
  std::vector<std::size_t> pick(static_cast<std::size_t>(users), 0);
  std::vector<std::size_t> best_pick = pick;
  double best_rate = -std::numeric_limits<double>::infinity();
  std::uint64_t evaluated = 0;

  while (true) {
    for (int k = 0; k < users; ++k) {
      const auto& sub = subsets[pick[static_cast<std::size_t>(k)]];
      for (int j = 0; j < n_s; ++j) {
        const int col = cand.per_user_range(k).begin + sub[static_cast<std::size_t>(j)];
        f.col(k * n_s + j) = cand.f_sel().col(col);
        w.col(k * n_s + j) = cand.w_sel().col(col);
      }
    }
    const double rate = sum_rate(channels, f, w, n_s, link);
    ++evaluated;
    if (rate > best_rate) {
      best_rate = rate;
      best_pick = pick;
    }
    // Odometer with user 0 most significant: lexicographic order.
    int k = users - 1;
    while (k >= 0 && ++pick[static_cast<std::size_t>(k)] == n_sub) {
      pick[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  if (evaluated != expected) throw NumericalError("svbs: enumeration count mismatch");

  std::vector<int> ind;
  ind.reserve(static_cast<std::size_t>(users) * n_s);
  for (int k = 0; k < users; ++k) {
    for (int local : subsets[best_pick[static_cast<std::size_t>(k)]]) {
      ind.push_back(cand.per_user_range(k).begin + local);
    }
  }
  SelectionResult result = assemble_result(cand, IndexSelection(std::move(ind), users, n_s));
  result.combinations_evaluated = evaluated;
  result.feasible = true;
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return result;
}

SelectionResult iosvb(const CandidateBeams& cand, int n_s, const GainConstraint& constraint,
                      std::uint64_t budget) {
  const auto start = Clock::now();
  check_streams(cand, n_s);
  const std::uint64_t expected = checked_search_size(cand, n_s, budget, "iosvb");
  const double gamma = constraint.gamma(1);

  const int users = cand.users();
  const auto subsets = lexicographic_subsets(cand.r_sel(), n_s);
  const std::size_t n_sub = subsets.size();
  const Eigen::MatrixXd weights = pair_weights(cand);

  // Global columns and gain of every (user, subset).
  std::vector<std::vector<std::vector<int>>> columns(static_cast<std::size_t>(users));
  std::vector<std::vector<double>> gains(static_cast<std::size_t>(users));
  double sigma_max = 0.0;
  for (int k = 0; k < users; ++k) {
    const int offset = cand.per_user_range(k).begin;
    auto& cols = columns[static_cast<std::size_t>(k)];
    auto& g = gains[static_cast<std::size_t>(k)];
    for (const auto& sub : subsets) {
      std::vector<int> global;
      double sum = 0.0;
      for (int local : sub) {
        global.push_back(offset + local);
        sum += cand.sigma()[offset + local];
      }
      cols.push_back(std::move(global));
      g.push_back(sum);
    }
    // Subset 0 is the top N_s columns; sigma is nonincreasing per user.
    sigma_max += g.front();
  }
  const double threshold = gamma * sigma_max;

  // cross[j][k][s_j * n_sub + s_k] for j < k: interference weight between
  // user j's subset s_j and user k's subset s_k.
  std::vector<std::vector<std::vector<double>>> cross(
      static_cast<std::size_t>(users), std::vector<std::vector<double>>(static_cast<std::size_t>(users)));
  for (int j = 0; j < users; ++j) {
    for (int k = j + 1; k < users; ++k) {
      auto& table = cross[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      table.resize(n_sub * n_sub);
      for (std::size_t sj = 0; sj < n_sub; ++sj) {
        for (std::size_t sk = 0; sk < n_sub; ++sk) {
          double sum = 0.0;
          for (int a : columns[static_cast<std::size_t>(j)][sj]) {
            for (int b : columns[static_cast<std::size_t>(k)][sk]) sum += weights(a, b);
          }
          table[sj * n_sub + sk] = sum;
        }
      }
    }
  }

  std::vector<std::size_t> pick(static_cast<std::size_t>(users), 0);
  std::vector<double> partial_score(static_cast<std::size_t>(users) + 1, 0.0);
  std::vector<double> partial_gain(static_cast<std::size_t>(users) + 1, 0.0);
  std::vector<std::size_t> best_pick = pick;
  std::vector<std::size_t> fallback_pick = pick;
  Incumbent best;
  MaxGain fallback;
  std::uint64_t evaluated = 0;

  // Depth-first over users; partial sums for levels < depth stay valid.
  int depth = 0;
  pick[0] = 0;
  while (depth >= 0) {
    const auto d = static_cast<std::size_t>(depth);
    if (pick[d] == n_sub) {
      pick[d] = 0;
      --depth;
      if (depth >= 0) ++pick[static_cast<std::size_t>(depth)];
      continue;
    }
    double score = partial_score[d];
    for (int j = 0; j < depth; ++j) {
      score += cross[static_cast<std::size_t>(j)][d][pick[static_cast<std::size_t>(j)] * n_sub + pick[d]];
    }
    const double gain = partial_gain[d] + gains[d][pick[d]];
    if (depth + 1 < users) {
      partial_score[d + 1] = score;
      partial_gain[d + 1] = gain;
      ++depth;
      pick[static_cast<std::size_t>(depth)] = 0;
      continue;
    }
    ++evaluated;
    if (gain > threshold && best.offer(score, gain)) best_pick = pick;
    if (fallback.offer(gain)) fallback_pick = pick;
    ++pick[d];
  }
  if (evaluated != expected) throw NumericalError("iosvb: enumeration count mismatch");

  const bool feasible = best.found;
  const auto& chosen = feasible ? best_pick : fallback_pick;
  std::vector<int> ind;
  ind.reserve(static_cast<std::size_t>(users) * n_s);
  for (int k = 0; k < users; ++k) {
    const auto& cols = columns[static_cast<std::size_t>(k)][chosen[static_cast<std::size_t>(k)]];
    ind.insert(ind.end(), cols.begin(), cols.end());
  }
  SelectionResult result = assemble_result(cand, IndexSelection(std::move(ind), users, n_s));
  result.combinations_evaluated = evaluated;
  result.feasible = feasible;
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return result;
}

SelectionResult g_iosvb(const CandidateBeams& cand, int n_s, const GainConstraint& gammas) {
  const auto start = Clock::now();
  check_streams(cand, n_s);
  if (!gammas.uniform() && gammas.schedule_length() != static_cast<std::size_t>(n_s)) {
    throw ConfigError("g_iosvb: gamma schedule has " + std::to_string(gammas.schedule_length()) +
                      " entries, expected " + std::to_string(n_s));
  }

  const int users = cand.users();
  const Eigen::MatrixXd weights = pair_weights(cand);
  const Eigen::VectorXd& sigma = cand.sigma();

  std::vector<std::vector<int>> chosen(static_cast<std::size_t>(users));
  std::vector<int> committed;  // every selected column so far
  double base_score = 0.0;
  bool feasible = true;
  std::uint64_t evaluated = 0;

  for (int m = 1; m <= n_s; ++m) {
    // Unused columns per user, ascending.
    std::vector<std::vector<int>> remaining(static_cast<std::size_t>(users));
    double sigma_max = 0.0;
    for (int k = 0; k < users; ++k) {
      const ColumnRange range = cand.per_user_range(k);
      auto& rem = remaining[static_cast<std::size_t>(k)];
      const auto& used = chosen[static_cast<std::size_t>(k)];
      double top = 0.0;
      for (int col = range.begin; col < range.end; ++col) {
        if (std::find(used.begin(), used.end(), col) != used.end()) continue;
        rem.push_back(col);
        top = std::max(top, sigma[col]);
      }
      sigma_max += top;
    }
    const double threshold = gammas.gamma(m) * sigma_max;

    // Weight of each unused column against everything already committed.
    Eigen::VectorXd against_committed = Eigen::VectorXd::Zero(cand.columns());
    for (const auto& rem : remaining) {
      for (int a : rem) {
        for (int b : committed) against_committed[a] += weights(a, b);
      }
    }

    const std::size_t width = remaining.front().size();
    std::vector<std::size_t> pick(static_cast<std::size_t>(users), 0);
    std::vector<double> partial_score(static_cast<std::size_t>(users) + 1, 0.0);
    std::vector<double> partial_gain(static_cast<std::size_t>(users) + 1, 0.0);
    partial_score[0] = base_score;
    std::vector<std::size_t> best_pick = pick;
    std::vector<std::size_t> fallback_pick = pick;
    Incumbent best;
    MaxGain fallback;

    int depth = 0;
    while (depth >= 0) {
      const auto d = static_cast<std::size_t>(depth);
      if (pick[d] == width) {
        pick[d] = 0;
        --depth;
        if (depth >= 0) ++pick[static_cast<std::size_t>(depth)];
        continue;
      }
      const int col = remaining[d][pick[d]];
      double score = partial_score[d] + against_committed[col];
      for (int j = 0; j < depth; ++j) {
        score += weights(remaining[static_cast<std::size_t>(j)][pick[static_cast<std::size_t>(j)]], col);
      }
      const double gain = partial_gain[d] + sigma[col];
      if (depth + 1 < users) {
        partial_score[d + 1] = score;
        partial_gain[d + 1] = gain;
        ++depth;
        pick[static_cast<std::size_t>(depth)] = 0;
        continue;
      }
      ++evaluated;
      if (gain > threshold && best.offer(score, gain)) best_pick = pick;
      if (fallback.offer(gain)) fallback_pick = pick;
      ++pick[d];
    }

    if (!best.found) feasible = false;
    const auto& winner = best.found ? best_pick : fallback_pick;
    for (int k = 0; k < users; ++k) {
      const int col = remaining[static_cast<std::size_t>(k)][winner[static_cast<std::size_t>(k)]];
      chosen[static_cast<std::size_t>(k)].push_back(col);
    }
    // Recompute the committed score from scratch so the fallback path and
    // the feasible path share one definition.
    for (int k = 0; k < users; ++k) committed.push_back(chosen[static_cast<std::size_t>(k)].back());
    base_score = 0.0;
    for (std::size_t a = 0; a < committed.size(); ++a) {
      for (std::size_t b = a + 1; b < committed.size(); ++b) base_score += weights(committed[a], committed[b]);
    }
  }

  std::vector<int> ind;
  ind.reserve(static_cast<std::size_t>(users) * n_s);
  for (const auto& cols : chosen) ind.insert(ind.end(), cols.begin(), cols.end());
  SelectionResult result = assemble_result(cand, IndexSelection(std::move(ind), users, n_s));
  result.combinations_evaluated = evaluated;
  result.feasible = feasible;
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return result;
}

}  // namespace beamsel
