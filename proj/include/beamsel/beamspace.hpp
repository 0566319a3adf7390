#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "beamsel/channel.hpp"

namespace beamsel {

/// Half-open column interval [begin, end).
struct ColumnRange {
  int begin = 0;
  int end = 0;
  int size() const noexcept { return end - begin; }
  bool contains(int column) const noexcept { return column >= begin && column < end; }
};

/// SVD factors of a single channel with canonical column phases: the
/// largest-magnitude entry of every right singular vector is real and
/// positive, and the matching left vector is rotated by the same phase.
struct UserSvd {
  CMatrix u;
  Eigen::VectorXd sigma;
  CMatrix v;
};

/// Thin SVD (min(n_r, n_t) triplets) or, with `full_left_basis`, a square
/// n_r x n_r left factor. Throws NumericalError on failure.
UserSvd canonical_svd(const CMatrix& h, bool full_left_basis = false);

/**
 * Per-user top-R singular triplets laid out side by side.
 *
 * Columns [k*R, (k+1)*R) of f_sel / w_sel hold user k's right / left
 * singular vectors in descending singular-value order; sigma holds the
 * matching singular values.
 */
class CandidateBeams {
public:
  CandidateBeams(CMatrix f_sel, CMatrix w_sel, Eigen::VectorXd sigma, int users, int r_sel);

  const CMatrix& f_sel() const noexcept { return f_sel_; }
  const CMatrix& w_sel() const noexcept { return w_sel_; }
  const Eigen::VectorXd& sigma() const noexcept { return sigma_; }
  int users() const noexcept { return users_; }
  int r_sel() const noexcept { return r_sel_; }
  int columns() const noexcept { return users_ * r_sel_; }
  int n_t() const noexcept { return static_cast<int>(f_sel_.rows()); }
  int n_r() const noexcept { return static_cast<int>(w_sel_.rows()); }

  ColumnRange per_user_range(int user) const noexcept {
    return {user * r_sel_, (user + 1) * r_sel_};
  }
  int user_of(int column) const noexcept { return column / r_sel_; }

private:
  CMatrix f_sel_;
  CMatrix w_sel_;
  Eigen::VectorXd sigma_;
  int users_;
  int r_sel_;
};

/// Global column indices into a CandidateBeams set, stored user-major:
/// entries [k*N_s, (k+1)*N_s) belong to user k.
class IndexSelection {
public:
  IndexSelection() = default;
  /// Throws SelectionError if the size is not users*n_s.
  IndexSelection(std::vector<int> ind, int users, int n_s);

  /// The first n_s candidate columns of every user block.
  static IndexSelection leading(const CandidateBeams& cand, int n_s);

  const std::vector<int>& ind() const noexcept { return ind_; }
  std::span<const int> per_user(int user) const;
  int users() const noexcept { return users_; }
  int n_s() const noexcept { return n_s_; }
  int size() const noexcept { return static_cast<int>(ind_.size()); }

  /// Throws SelectionError when an index falls outside its user's block or
  /// a user repeats a column.
  void validate(const CandidateBeams& cand) const;

  friend bool operator==(const IndexSelection&, const IndexSelection&) = default;

private:
  std::vector<int> ind_;
  int users_ = 0;
  int n_s_ = 0;
};

/// A square correlation matrix with the candidate column index of every
/// row/column.
struct CorrelationMatrix {
  CMatrix entries;
  std::vector<int> labels;

  int order() const noexcept { return static_cast<int>(entries.rows()); }
};

/// Throws ConfigError if r_sel is not in [1, min(n_r, n_t)].
CandidateBeams decompose(const ChannelSet& channels, int r_sel);

/// diag(sigma) * F_sel^H * F_sel, order U*R_sel.
CorrelationMatrix build_c_sel(const CandidateBeams& cand);

/// Restriction of C_sel to the selected rows and columns, in selection order.
CorrelationMatrix c_corr_for(const CandidateBeams& cand, const IndexSelection& sel);

/// Hadamard-masked C_sel: full order, entries outside the selected
/// rows/columns set to zero.
CMatrix mask_c_sel(const CorrelationMatrix& c_sel, const IndexSelection& sel);

/// ||C - diag(C)||_F
double objective(const CMatrix& c);
inline double objective(const CorrelationMatrix& c) { return objective(c.entries); }

}  // namespace beamsel
