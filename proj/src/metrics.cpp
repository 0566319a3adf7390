#include "beamsel/metrics.hpp"

#include <cmath>
#include <string>

#include "beamsel/errors.hpp"

namespace beamsel {

namespace {

void check_dimensions(const ChannelSet& channels, const CMatrix& f_io, const CMatrix& w_io,
                      int n_s) {
  const Eigen::Index streams = static_cast<Eigen::Index>(channels.num_users()) * n_s;
  if (n_s < 1 || f_io.rows() != channels.n_t() || w_io.rows() != channels.n_r() ||
      f_io.cols() != streams || w_io.cols() != streams) {
    throw ConfigError("beam matrices do not match the channel set dimensions");
  }
}

int streams_per_user(const ChannelSet& channels, const SelectionResult& result) {
  if (result.f_io.cols() % channels.num_users() != 0) {
    throw ConfigError("selection result does not split evenly across users");
  }
  return static_cast<int>(result.f_io.cols() / channels.num_users());
}

}  // namespace

LinkBudget::LinkBudget(double tx_power, double noise_power)
    : tx_power_(tx_power), noise_power_(noise_power) {
  if (!(tx_power_ > 0.0) || !std::isfinite(tx_power_)) {
    throw ConfigError("link budget: tx_power must be positive and finite");
  }
  if (!(noise_power_ > 0.0) || !std::isfinite(noise_power_)) {
    throw ConfigError("link budget: noise power must be positive and finite");
  }
}

LinkBudget LinkBudget::from_snr_db(double snr_db, double tx_power) {
  if (!std::isfinite(snr_db)) throw ConfigError("link budget: SNR must be finite");
  return LinkBudget(tx_power, tx_power / std::pow(10.0, snr_db / 10.0));
}

double sum_rate(const ChannelSet& channels, const CMatrix& f_io, const CMatrix& w_io, int n_s,
                const LinkBudget& budget) {
  check_dimensions(channels, f_io, w_io, n_s);
  const int users = channels.num_users();
  const double p = budget.per_stream_power(users, n_s);
  const double noise = n_s * budget.noise_power();
  double rate = 0.0;
  for (int k = 0; k < users; ++k) {
    // Row block k of W^H H_k F: user k's combined view of every stream.
    const CMatrix seen = (w_io.middleCols(k * n_s, n_s).adjoint() * channels[k]) * f_io;
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < users; ++i) {
      const double energy = seen.middleCols(i * n_s, n_s).squaredNorm();
      (i == k ? signal : interference) += energy;
    }
    const double sinr = p * signal / (p * interference + noise);
    if (!std::isfinite(sinr)) {
      throw NumericalError("spectral efficiency: non-finite SINR for user " + std::to_string(k));
    }
    rate += std::log2(1.0 + sinr);
  }
  return rate;
}

double spectral_efficiency(const ChannelSet& channels, const SelectionResult& result,
                           const LinkBudget& budget) {
  return sum_rate(channels, result.f_io, result.w_io, streams_per_user(channels, result), budget);
}

double interference_direct(const ChannelSet& channels, const SelectionResult& result) {
  const int n_s = streams_per_user(channels, result);
  check_dimensions(channels, result.f_io, result.w_io, n_s);
  const int users = channels.num_users();
  double total = 0.0;
  for (int k = 0; k < users; ++k) {
    const CMatrix combined = result.w_io.middleCols(k * n_s, n_s).adjoint() * channels[k];
    for (int i = 0; i < users; ++i) {
      if (i == k) continue;
      total += (combined * result.f_io.middleCols(i * n_s, n_s)).squaredNorm();
    }
  }
  return total;
}

double interference_via_corr(const CorrelationMatrix& c_corr) {
  const double f = objective(c_corr);
  return f * f;
}

double verify_corollary1(const ChannelSet& channels, const CandidateBeams& cand, int user,
                         const IndexSelection& sel) {
  if (user < 0 || user >= channels.num_users()) {
    throw ConfigError("corollary check: user " + std::to_string(user) + " out of range");
  }
  sel.validate(cand);
  const UserSvd svd = canonical_svd(channels[user], /*full_left_basis=*/true);
  const auto cols = sel.per_user(user);
  const int n_r = channels.n_r();
  const int offset = cand.per_user_range(user).begin;

  CMatrix picked(static_cast<Eigen::Index>(cols.size()), n_r);
  Eigen::MatrixXd selector = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cols.size()), n_r);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const int local = cols[j] - offset;
    const auto row = static_cast<Eigen::Index>(j);
    picked.row(row) = svd.u.col(local).adjoint();
    selector(row, local) = 1.0;
  }
  return (picked * svd.u - selector.cast<Complex>()).norm();
}

IdentitySides verify_lemma1(const ChannelSet& channels, const CandidateBeams& cand,
                            const IndexSelection& sel, int k, int i) {
  if (k == i) throw ConfigError("lemma check: desired and interfering user must differ");
  if (k < 0 || i < 0 || k >= channels.num_users() || i >= channels.num_users()) {
    throw ConfigError("lemma check: user index out of range");
  }
  sel.validate(cand);
  const auto ind_k = sel.per_user(k);
  const auto ind_i = sel.per_user(i);
  const auto nk = static_cast<Eigen::Index>(ind_k.size());
  const auto ni = static_cast<Eigen::Index>(ind_i.size());

  CMatrix w_k(cand.n_r(), nk);
  CMatrix v_k(cand.n_t(), nk);
  Eigen::VectorXd s_k(nk);
  for (Eigen::Index j = 0; j < nk; ++j) {
    const int col = ind_k[static_cast<std::size_t>(j)];
    w_k.col(j) = cand.w_sel().col(col);
    v_k.col(j) = cand.f_sel().col(col);
    s_k[j] = cand.sigma()[col];
  }
  CMatrix f_i(cand.n_t(), ni);
  for (Eigen::Index j = 0; j < ni; ++j) {
    f_i.col(j) = cand.f_sel().col(ind_i[static_cast<std::size_t>(j)]);
  }

  IdentitySides sides;
  sides.lhs = (w_k.adjoint() * channels[k] * f_i).squaredNorm();
  sides.rhs = (s_k.cast<Complex>().asDiagonal() * (v_k.adjoint() * f_i)).squaredNorm();
  return sides;
}

double verify_lemma2(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw ConfigError("lemma 2 check: A and B are not conformable");
  CMatrix product = a.transpose() * b;
  product.diagonal().setZero();

  double worst = 0.0;
  for (Eigen::Index k = 0; k < product.rows(); ++k) {
    for (Eigen::Index i = 0; i < product.cols(); ++i) {
      Complex cross(0.0, 0.0);
      if (i != k) {
        for (Eigen::Index l = 0; l < a.rows(); ++l) cross += a(l, k) * b(l, i);
      }
      worst = std::max(worst, std::abs(product(k, i) - cross));
    }
  }
  return worst;
}

}  // namespace beamsel
