#pragma once

#include "beamsel/beamspace.hpp"
#include "beamsel/channel.hpp"
#include "beamsel/selection.hpp"

namespace beamsel {

/// Transmit power and receiver noise. Each of the U*N_s streams gets
/// tx_power / (U*N_s).
class LinkBudget {
public:
  /// Throws ConfigError unless both powers are positive and finite.
  LinkBudget(double tx_power, double noise_power);
  /// noise_power = tx_power / 10^(snr_db/10)
  static LinkBudget from_snr_db(double snr_db, double tx_power = 1.0);

  double tx_power() const noexcept { return tx_power_; }
  double noise_power() const noexcept { return noise_power_; }
  double per_stream_power(int users, int n_s) const noexcept {
    return tx_power_ / (static_cast<double>(users) * n_s);
  }

private:
  double tx_power_;
  double noise_power_;
};

/**
 * Sum rate in bits/s/Hz for precoders F (N_t x U*N_s) and combiners
 * W (N_r x U*N_s), user k owning columns [k*N_s, (k+1)*N_s):
 *
 *   sum_k log2(1 + S_k / (D_k + N_s*noise))
 *   S_k = p ||W_k^H H_k F_k||_F^2,  D_k = p sum_{i != k} ||W_k^H H_k F_i||_F^2
 *
 * with p the per-stream power. The noise term is the expectation of
 * ||W_k^H n_k||^2 for orthonormal combiner columns.
 */
double sum_rate(const ChannelSet& channels, const CMatrix& f_io, const CMatrix& w_io, int n_s,
                const LinkBudget& budget);

double spectral_efficiency(const ChannelSet& channels, const SelectionResult& result,
                           const LinkBudget& budget);

/// sum_k sum_{i != k} ||W_k^H H_k F_i||_F^2 at unit power.
double interference_direct(const ChannelSet& channels, const SelectionResult& result);

/// Squared Frobenius norm of the off-diagonal part of a correlation matrix.
double interference_via_corr(const CorrelationMatrix& c_corr);

// ---------------------------------------------------------------------------
// Numerical checks of the interference identities
// ---------------------------------------------------------------------------

/// ||U_k^H[ind_k] U_k - I[ind_k]||_F using user k's full left singular basis.
double verify_corollary1(const ChannelSet& channels, const CandidateBeams& cand, int user,
                         const IndexSelection& sel);

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = ||W_k^H H_k F_i||_F^2 from the raw channel,
/// rhs = ||Sigma_k[ind_k] V_k[ind_k]^H V_i[ind_i]||_F^2 from SVD factors.
/// Throws ConfigError when k == i.
IdentitySides verify_lemma1(const ChannelSet& channels, const CandidateBeams& cand,
                            const IndexSelection& sel, int k, int i);

/// Max-abs difference between (A^T B with its diagonal zeroed) and the
/// matrix of cross terms row_k(A^T) . col_i(B), i != k, built one entry at
/// a time.
double verify_lemma2(const CMatrix& a, const CMatrix& b);

}  // namespace beamsel
