// beamsel: beam-selection experiments from the command line.
//
//   beamsel gen-channels      --config c.json --seed 7 --out dir
//   beamsel run               --config c.json --snr 10,25 --realizations 20
//   beamsel sweep-gamma       --config c.json --gamma1 0.3,0.6,0.9
//   beamsel sweep-grid        --r-sel 4,5,6 --n-s 2,3
//   beamsel report-iterations --r-sel 4,5,6 --n-s 2,3 --users 5

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamsel/errors.hpp"
#include "beamsel/harness.hpp"

namespace {

using namespace beamsel;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  std::vector<double> snr;
  std::optional<int> realizations;
  std::optional<std::uint64_t> budget;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Experiment seed");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--snr", o.snr, "SNR grid in dB, comma separated")->delimiter(',');
  cmd->add_option("--realizations", o.realizations, "Channel realizations");
  cmd->add_option("--budget", o.budget, "Exhaustive search cap (combinations)");
}

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.snr.empty()) cfg.snr_db = o.snr;
  if (o.realizations) cfg.realizations = *o.realizations;
  if (o.budget) cfg.budget = *o.budget;
  return cfg;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParseError(dir.string() + ": cannot create output directory: " + ec.message());
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw ParseError(path.string() + ": write failed");
  std::cerr << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MU-MIMO singular-vector beam selection experiments"};
  app.require_subcommand(1);

  CommonOptions gen_opts, run_opts, gamma_opts, grid_opts, iter_opts;

  auto* gen = app.add_subcommand("gen-channels", "Generate (or re-export) one channel realization");
  add_common(gen, gen_opts);
  int gen_realization = 0;
  std::string gen_encoding = "binary";
  gen->add_option("--realization", gen_realization, "Realization index")->capture_default_str();
  gen->add_option("--encoding", gen_encoding, "binary or json-inline")
      ->check(CLI::IsMember({"binary", "json-inline"}))
      ->capture_default_str();

  auto* run = app.add_subcommand("run", "Run the configured algorithms over all realizations");
  add_common(run, run_opts);
  std::vector<std::string> run_algorithms;
  run->add_option("--algorithms", run_algorithms, "svbs,iosvb,g-iosvb")->delimiter(',');

  auto* gamma = app.add_subcommand("sweep-gamma", "Mean G-IOSVB SE over a (gamma1, gamma2) grid");
  add_common(gamma, gamma_opts);
  std::vector<double> gamma1{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> gamma2 = gamma1;
  gamma->add_option("--gamma1", gamma1, "First-iteration thresholds")->delimiter(',');
  gamma->add_option("--gamma2", gamma2, "Second-iteration thresholds")->delimiter(',');

  auto* grid = app.add_subcommand("sweep-grid", "IOSVB vs G-IOSVB over (R_sel, N_s) pairs");
  add_common(grid, grid_opts);
  std::vector<int> grid_r_sel{4, 5, 6};
  std::vector<int> grid_n_s{2, 3};
  grid->add_option("--r-sel", grid_r_sel, "R_sel values")->delimiter(',');
  grid->add_option("--n-s", grid_n_s, "N_s values")->delimiter(',');

  auto* iters = app.add_subcommand("report-iterations", "Exact and approximate iteration counts");
  add_common(iters, iter_opts);
  std::vector<int> iter_r_sel{3, 4, 5, 6};
  std::vector<int> iter_n_s{2, 3, 4, 5, 6};
  std::optional<int> iter_users;
  iters->add_option("--r-sel", iter_r_sel, "R_sel values")->delimiter(',');
  iters->add_option("--n-s", iter_n_s, "N_s values")->delimiter(',');
  iters->add_option("--users", iter_users, "Number of users (default: config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      ExperimentConfig cfg = resolve(gen_opts);
      cfg.validate();
      const ChannelSet set = realization_channels(cfg, gen_realization);
      std::error_code ec;
      fs::create_directories(gen_opts.out, ec);
      if (ec) throw ParseError(gen_opts.out + ": cannot create output directory");
      const fs::path manifest = fs::path(gen_opts.out) / "channels.json";
      save_channels(set, manifest,
                    gen_encoding == "binary" ? ChannelEncoding::InterleavedF64LE
                                             : ChannelEncoding::JsonInline);
      std::cerr << "wrote " << manifest.string() << '\n';
    } else if (run->parsed()) {
      ExperimentConfig cfg = resolve(run_opts);
      if (!run_algorithms.empty()) {
        cfg.algorithms.clear();
        for (const auto& a : run_algorithms) cfg.algorithms.push_back(parse_algorithm(a));
      }
      const auto records = run_experiment(cfg);
      const fs::path dir = run_opts.out;
      auto out = open_output(dir, "runs.csv");
      write_run_csv(out, records);
      finish(out, dir / "runs.csv");
      auto manifest = open_output(dir, "config.json");
      manifest << config_to_json(cfg).dump(2) << '\n';
      finish(manifest, dir / "config.json");
    } else if (gamma->parsed()) {
      ExperimentConfig cfg = resolve(gamma_opts);
      const GammaSweep sweep = sweep_gamma(cfg, gamma1, gamma2);
      const fs::path dir = gamma_opts.out;
      auto out = open_output(dir, "gamma_sweep.csv");
      write_gamma_csv(out, sweep);
      finish(out, dir / "gamma_sweep.csv");

      const auto [row, col] = sweep.argmax();
      const bool matches = sweep.argmax_near(0.6, 0.6, 1);
      nlohmann::json report = {{"argmax_gamma1", sweep.gamma1[row]},
                               {"argmax_gamma2", sweep.gamma2[col]},
                               {"argmax_mean_se", sweep.mean_se(static_cast<Eigen::Index>(row),
                                                                static_cast<Eigen::Index>(col))},
                               {"reference", {0.6, 0.6}},
                               {"within_one_step_of_reference", matches},
                               {"model_mismatch", !matches},
                               {"realizations", cfg.realizations},
                               {"snr_db", sweep.snr_db}};
      auto rep = open_output(dir, "gamma_sweep_report.json");
      rep << report.dump(2) << '\n';
      finish(rep, dir / "gamma_sweep_report.json");
      std::cout << "argmax (gamma1, gamma2) = (" << sweep.gamma1[row] << ", " << sweep.gamma2[col]
                << ")\n";
      if (!matches) {
        std::cout << "MODEL-MISMATCH: argmax is more than one grid step from (0.6, 0.6)"
                     " on these channels\n";
      }
    } else if (grid->parsed()) {
      ExperimentConfig cfg = resolve(grid_opts);
      const auto cells = sweep_grid(cfg, grid_r_sel, grid_n_s);
      const fs::path dir = grid_opts.out;
      auto out = open_output(dir, "grid_sweep.csv");
      write_grid_csv(out, cells);
      finish(out, dir / "grid_sweep.csv");
    } else if (iters->parsed()) {
      ExperimentConfig cfg = resolve(iter_opts);
      const int users = iter_users.value_or(cfg.channel.num_users);
      const auto rows = report_iterations(iter_r_sel, iter_n_s, users);
      write_iterations_csv(std::cout, rows);
      const fs::path dir = iter_opts.out;
      auto out = open_output(dir, "iterations.csv");
      write_iterations_csv(out, rows);
      finish(out, dir / "iterations.csv");
    }
  } catch (const beamsel::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
