#include "beamsel/beamspace.hpp"

#include <algorithm>
#include <string>

#include "beamsel/errors.hpp"

namespace beamsel {

UserSvd canonical_svd(const CMatrix& h, bool full_left_basis) {
  const unsigned options =
      (full_left_basis ? Eigen::ComputeFullU : Eigen::ComputeThinU) | Eigen::ComputeThinV;
  Eigen::JacobiSVD<CMatrix> svd(h, options);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("SVD did not converge");
  }
  UserSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (!out.sigma.allFinite() || !out.u.allFinite() || !out.v.allFinite()) {
    throw NumericalError("SVD produced non-finite factors");
  }

  for (Eigen::Index j = 0; j < out.v.cols(); ++j) {
    Eigen::Index peak = 0;
    out.v.col(j).cwiseAbs().maxCoeff(&peak);
    const Complex pivot = out.v(peak, j);
    const double mag = std::abs(pivot);
    if (mag == 0.0) continue;
    const Complex rotate = std::conj(pivot) / mag;
    out.v.col(j) *= rotate;
    out.u.col(j) *= rotate;
    out.v(peak, j) = Complex(std::abs(out.v(peak, j)), 0.0);
  }
  return out;
}

CandidateBeams::CandidateBeams(CMatrix f_sel, CMatrix w_sel, Eigen::VectorXd sigma, int users,
                               int r_sel)
    : f_sel_(std::move(f_sel)),
      w_sel_(std::move(w_sel)),
      sigma_(std::move(sigma)),
      users_(users),
      r_sel_(r_sel) {
  if (users_ < 1 || r_sel_ < 1) throw ConfigError("candidate beams: users and r_sel must be >= 1");
  const Eigen::Index cols = static_cast<Eigen::Index>(users_) * r_sel_;
  if (f_sel_.cols() != cols || w_sel_.cols() != cols || sigma_.size() != cols) {
    throw ConfigError("candidate beams: expected " + std::to_string(cols) + " columns");
  }
  if (!sigma_.allFinite() || (sigma_.array() < 0.0).any()) {
    throw NumericalError("candidate beams: singular values must be finite and nonnegative");
  }
}

IndexSelection::IndexSelection(std::vector<int> ind, int users, int n_s)
    : ind_(std::move(ind)), users_(users), n_s_(n_s) {
  if (users_ < 1 || n_s_ < 1) throw SelectionError("selection: users and n_s must be >= 1");
  if (ind_.size() != static_cast<std::size_t>(users_) * n_s_) {
    throw SelectionError("selection: expected " + std::to_string(users_ * n_s_) +
                         " indices, got " + std::to_string(ind_.size()));
  }
}

IndexSelection IndexSelection::leading(const CandidateBeams& cand, int n_s) {
  if (n_s < 1 || n_s > cand.r_sel()) {
    throw SelectionError("selection: n_s must be in [1, r_sel]");
  }
  std::vector<int> ind;
  ind.reserve(static_cast<std::size_t>(cand.users()) * n_s);
  for (int k = 0; k < cand.users(); ++k) {
    for (int j = 0; j < n_s; ++j) ind.push_back(cand.per_user_range(k).begin + j);
  }
  return IndexSelection(std::move(ind), cand.users(), n_s);
}

std::span<const int> IndexSelection::per_user(int user) const {
  if (user < 0 || user >= users_) throw SelectionError("selection: user out of range");
  return std::span<const int>(ind_).subspan(static_cast<std::size_t>(user) * n_s_,
                                            static_cast<std::size_t>(n_s_));
}

void IndexSelection::validate(const CandidateBeams& cand) const {
  if (users_ != cand.users()) {
    throw SelectionError("selection: has " + std::to_string(users_) +
                         " users, candidates have " + std::to_string(cand.users()));
  }
  if (n_s_ > cand.r_sel()) {
    throw SelectionError("selection: n_s = " + std::to_string(n_s_) + " exceeds r_sel = " +
                         std::to_string(cand.r_sel()));
  }
  for (int k = 0; k < users_; ++k) {
    const auto cols = per_user(k);
    const ColumnRange range = cand.per_user_range(k);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (!range.contains(cols[j])) {
        throw SelectionError("selection: index " + std::to_string(cols[j]) + " of user " +
                             std::to_string(k) + " is outside [" + std::to_string(range.begin) +
                             ", " + std::to_string(range.end) + ")");
      }
      if (std::find(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(j), cols[j]) !=
          cols.begin() + static_cast<std::ptrdiff_t>(j)) {
        throw SelectionError("selection: user " + std::to_string(k) + " repeats column " +
                             std::to_string(cols[j]));
      }
    }
  }
}

CandidateBeams decompose(const ChannelSet& channels, int r_sel) {
  const int rank_bound = std::min(channels.n_r(), channels.n_t());
  if (r_sel < 1 || r_sel > rank_bound) {
    throw ConfigError("decompose: r_sel = " + std::to_string(r_sel) + " must be in [1, " +
                      std::to_string(rank_bound) + "]");
  }
  const int users = channels.num_users();
  CMatrix f_sel(channels.n_t(), users * r_sel);
  CMatrix w_sel(channels.n_r(), users * r_sel);
  Eigen::VectorXd sigma(users * r_sel);
  for (int k = 0; k < users; ++k) {
    UserSvd svd;
    try {
      svd = canonical_svd(channels[k]);
    } catch (const NumericalError& e) {
      throw NumericalError("decompose: user " + std::to_string(k) + ": " + e.what());
    }
    f_sel.middleCols(k * r_sel, r_sel) = svd.v.leftCols(r_sel);
    w_sel.middleCols(k * r_sel, r_sel) = svd.u.leftCols(r_sel);
    sigma.segment(k * r_sel, r_sel) = svd.sigma.head(r_sel);
  }
  return CandidateBeams(std::move(f_sel), std::move(w_sel), std::move(sigma), users, r_sel);
}

CorrelationMatrix build_c_sel(const CandidateBeams& cand) {
  CorrelationMatrix c;
  c.entries = cand.sigma().cast<Complex>().asDiagonal() * (cand.f_sel().adjoint() * cand.f_sel());
  c.labels.resize(static_cast<std::size_t>(cand.columns()));
  for (int a = 0; a < cand.columns(); ++a) c.labels[static_cast<std::size_t>(a)] = a;
  return c;
}

CorrelationMatrix c_corr_for(const CandidateBeams& cand, const IndexSelection& sel) {
  sel.validate(cand);
  const int n = sel.size();
  CMatrix f(cand.n_t(), n);
  Eigen::VectorXd s(n);
  for (int a = 0; a < n; ++a) {
    const int col = sel.ind()[static_cast<std::size_t>(a)];
    f.col(a) = cand.f_sel().col(col);
    s[a] = cand.sigma()[col];
  }
  // Order U*N_s is small: a coefficient-based product beats blocked GEMM.
  return {s.cast<Complex>().asDiagonal() * f.adjoint().lazyProduct(f), sel.ind()};
}

CMatrix mask_c_sel(const CorrelationMatrix& c_sel, const IndexSelection& sel) {
  const Eigen::Index n = c_sel.entries.rows();
  Eigen::VectorXd keep = Eigen::VectorXd::Zero(n);
  for (int col : sel.ind()) {
    if (col < 0 || col >= n) throw SelectionError("mask: index out of range");
    keep[col] = 1.0;
  }
  const Eigen::MatrixXd mask = keep * keep.transpose();
  return c_sel.entries.cwiseProduct(mask.cast<Complex>());
}

double objective(const CMatrix& c) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (i != j) sum += std::norm(c(i, j));
    }
  }
  return std::sqrt(sum);
}

}  // namespace beamsel
