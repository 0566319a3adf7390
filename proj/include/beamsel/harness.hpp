#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "beamsel/channel.hpp"
#include "beamsel/selection.hpp"

namespace beamsel {

enum class Algorithm { Svbs, Iosvb, GIosvb };

std::string_view algorithm_name(Algorithm algo) noexcept;
/// Accepts "svbs", "iosvb", "g-iosvb". Throws ConfigError.
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
  /// Generator settings; ignored (apart from validation of the selection
  /// dimensions) when import_path is set.
  SVChannelConfig channel;
  std::optional<std::filesystem::path> import_path;

  int n_s = 2;
  int r_sel = 4;
  /// One value for every greedy iteration, or one per iteration.
  std::vector<double> gamma{0.6};

  std::vector<double> snr_db{25.0};
  double tx_power = 1.0;

  std::vector<Algorithm> algorithms{Algorithm::Iosvb, Algorithm::GIosvb};
  int realizations = 100;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultSearchBudget;

  /// Throws ConfigError.
  void validate() const;
  GainConstraint gain_constraint() const { return GainConstraint(gamma); }
};

/// Top-level keys: channel, selection, link, run. Missing keys keep their
/// defaults; unknown keys are rejected. Throws ConfigError on schema errors.
/// Cross-field checks are left to ExperimentConfig::validate so that CLI
/// overrides can be applied first.
ExperimentConfig config_from_json(const nlohmann::json& doc);
/// Throws ParseError for unreadable files or invalid JSON.
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Channels for realization r: generated from derive_seed(cfg.seed, r), or
/// the imported set.
ChannelSet realization_channels(const ExperimentConfig& cfg, int realization);

struct RunRecord {
  Algorithm algorithm = Algorithm::GIosvb;
  int realization = 0;
  double snr_db = 0.0;
  double se_bps_hz = 0.0;
  double objective = 0.0;
  std::uint64_t combinations = 0;
  double select_ms = 0.0;
  double svd_ms = 0.0;
  bool feasible = true;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t seed = 0;
};

/// Records ordered by (realization, SNR point, algorithm).
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

struct GammaSweep {
  std::vector<double> gamma1;
  std::vector<double> gamma2;
  /// mean_se(i, j) for (gamma1[i], gamma2[j]).
  Eigen::MatrixXd mean_se;
  double snr_db = 0.0;

  /// Cell with the largest mean SE; first in row-major order on ties.
  std::pair<std::size_t, std::size_t> argmax() const;
  /// Whether the argmax lies within `steps` grid steps (Chebyshev distance
  /// on grid indices) of the cell nearest to (g1, g2).
  bool argmax_near(double g1, double g2, int steps = 1) const;
};

/// Mean G-IOSVB SE per (gamma1, gamma2) at the first configured SNR.
/// Requires N_s = 2.
GammaSweep sweep_gamma(const ExperimentConfig& cfg, std::span<const double> gamma1_grid,
                       std::span<const double> gamma2_grid);

struct GridCell {
  int r_sel = 0;
  int n_s = 0;
  Algorithm algorithm = Algorithm::GIosvb;
  double mean_se = 0.0;
  double mean_select_ms = 0.0;
  std::uint64_t combinations = 0;
};

/// IOSVB and G-IOSVB for every (R_sel, N_s) pair with N_s <= R_sel, at the
/// first configured SNR. Pairs with N_s > R_sel are skipped.
std::vector<GridCell> sweep_grid(const ExperimentConfig& cfg, std::span<const int> r_sel_values,
                                 std::span<const int> n_s_values);

struct IterationRow {
  int n_s = 0;
  int r_sel = 0;
  int users = 0;
  std::string n_exhaustive;
  std::string n_greedy_direct;
  std::string n_greedy_closed;
  double gain_exact = 0.0;
  /// Absent when N_s == R_sel.
  std::optional<double> gain_stirling;
};

/// One row per (N_s, R_sel) with N_s <= R_sel, N_s-major.
std::vector<IterationRow> report_iterations(std::span<const int> r_sel_values,
                                            std::span<const int> n_s_values, int users);

// CSV writers. Headers are fixed; numbers use shortest round-trip form.
void write_run_csv(std::ostream& out, std::span<const RunRecord> records);
void write_gamma_csv(std::ostream& out, const GammaSweep& sweep);
void write_grid_csv(std::ostream& out, std::span<const GridCell> cells);
void write_iterations_csv(std::ostream& out, std::span<const IterationRow> rows);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace beamsel
