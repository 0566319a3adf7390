#include "beamsel/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "beamsel/analytics.hpp"
#include "beamsel/beamspace.hpp"
#include "beamsel/errors.hpp"
#include "beamsel/metrics.hpp"

namespace beamsel {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double to_ms(std::chrono::nanoseconds ns) {
  return static_cast<double>(std::max<std::int64_t>(ns.count(), 1)) / 1e6;
}

void reject_unknown(const json& obj, const char* section, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(std::string("config: \"") + section + "\" must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end()) {
      throw ConfigError(std::string("config: unknown key \"") + section + "." + key + "\"");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& into, const char* section) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: \"") + section + "." + key + "\" has the wrong type");
  }
}

/// A number or an array of numbers.
std::vector<double> read_number_list(const json& value, const char* what) {
  std::vector<double> out;
  if (value.is_number()) {
    out.push_back(value.get<double>());
  } else if (value.is_array()) {
    for (const auto& v : value) {
      if (!v.is_number()) throw ConfigError(std::string("config: ") + what + " entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else {
    throw ConfigError(std::string("config: ") + what + " must be a number or an array");
  }
  return out;
}

ArrayGeometry geometry_from_json(const json& g, const char* section) {
  reject_unknown(g, section, {"kind", "elements", "rows", "cols", "spacing"});
  std::string kind = "ula";
  double spacing = 0.5;
  read(g, "kind", kind, section);
  read(g, "spacing", spacing, section);
  if (kind == "ula") {
    int elements = 0;
    read(g, "elements", elements, section);
    return ArrayGeometry::ula(elements, spacing);
  }
  if (kind == "upa") {
    int rows = 0;
    int cols = 0;
    read(g, "rows", rows, section);
    read(g, "cols", cols, section);
    return ArrayGeometry::upa(rows, cols, spacing);
  }
  throw ConfigError(std::string("config: ") + section + ".kind must be \"ula\" or \"upa\"");
}

json geometry_to_json(const ArrayGeometry& g) {
  if (g.kind == ArrayGeometry::Kind::UniformPlanar) {
    return {{"kind", "upa"}, {"rows", g.rows}, {"cols", g.cols}, {"spacing", g.element_spacing}};
  }
  return {{"kind", "ula"}, {"elements", g.element_count}, {"spacing", g.element_spacing}};
}

struct Realization {
  ChannelSet channels;
  CandidateBeams cand;
  double svd_ms;
};

Realization prepare(const ExperimentConfig& cfg, int r, int r_sel) {
  ChannelSet channels = realization_channels(cfg, r);
  const auto start = Clock::now();
  CandidateBeams cand = decompose(channels, r_sel);
  const double svd_ms = to_ms(Clock::now() - start);
  return {std::move(channels), std::move(cand), svd_ms};
}

SelectionResult select(Algorithm algo, const ExperimentConfig& cfg, const ChannelSet& channels,
                       const CandidateBeams& cand, int n_s, const GainConstraint& gains,
                       const LinkBudget& link) {
  switch (algo) {
    case Algorithm::Svbs:
      return svbs(channels, cand, n_s, link.noise_power(), link.tx_power(), cfg.budget);
    case Algorithm::Iosvb:
      return iosvb(cand, n_s, gains, cfg.budget);
    case Algorithm::GIosvb:
      return g_iosvb(cand, n_s, gains);
  }
  throw ConfigError("unknown algorithm");
}

std::uint64_t predicted_count(Algorithm algo, int r_sel, int n_s, int users) {
  const ExactInteger n = algo == Algorithm::GIosvb ? n_iter_greedy_direct(r_sel, n_s, users)
                                                   : n_iter_exhaustive(r_sel, n_s, users);
  return n.convert_to<std::uint64_t>();
}

}  // namespace

std::string_view algorithm_name(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::Svbs: return "svbs";
    case Algorithm::Iosvb: return "iosvb";
    case Algorithm::GIosvb: return "g-iosvb";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "svbs") return Algorithm::Svbs;
  if (name == "iosvb") return Algorithm::Iosvb;
  if (name == "g-iosvb") return Algorithm::GIosvb;
  throw ConfigError("unknown algorithm \"" + std::string(name) +
                    "\" (expected svbs, iosvb or g-iosvb)");
}

void ExperimentConfig::validate() const {
  if (!import_path) channel.validate();
  if (n_s < 1) throw ConfigError("config: n_s must be >= 1");
  if (r_sel < n_s) {
    throw ConfigError("config: r_sel (" + std::to_string(r_sel) + ") must be >= n_s (" +
                      std::to_string(n_s) + ")");
  }
  if (!import_path && r_sel > std::min(channel.n_r, channel.n_t)) {
    throw ConfigError("config: r_sel (" + std::to_string(r_sel) + ") exceeds min(n_r, n_t) = " +
                      std::to_string(std::min(channel.n_r, channel.n_t)));
  }
  (void)gain_constraint();
  if (gamma.size() > 1 && gamma.size() != static_cast<std::size_t>(n_s)) {
    throw ConfigError("config: gamma schedule needs one entry per stream (" +
                      std::to_string(n_s) + ")");
  }
  if (snr_db.empty()) throw ConfigError("config: snr_db grid is empty");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("config: snr_db entries must be finite");
  }
  (void)LinkBudget(tx_power, 1.0);
  if (algorithms.empty()) throw ConfigError("config: no algorithms requested");
  if (realizations < 1) throw ConfigError("config: realizations must be >= 1");
  if (import_path && realizations != 1) {
    throw ConfigError("config: an imported channel set is a single realization; set realizations = 1");
  }
  if (budget == 0) throw ConfigError("config: budget must be positive");
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig cfg;
  reject_unknown(doc, "<root>", {"channel", "selection", "link", "run"});

  if (doc.contains("channel")) {
    const json& c = doc["channel"];
    reject_unknown(c, "channel", {"num_users", "n_t", "n_r", "num_paths", "tx_geometry",
                                  "rx_geometry", "import_path"});
    read(c, "num_users", cfg.channel.num_users, "channel");
    read(c, "n_t", cfg.channel.n_t, "channel");
    read(c, "n_r", cfg.channel.n_r, "channel");
    read(c, "num_paths", cfg.channel.num_paths, "channel");
    if (c.contains("tx_geometry")) cfg.channel.tx_geometry = geometry_from_json(c["tx_geometry"], "channel.tx_geometry");
    if (c.contains("rx_geometry")) cfg.channel.rx_geometry = geometry_from_json(c["rx_geometry"], "channel.rx_geometry");
    if (c.contains("import_path")) {
      std::string p;
      read(c, "import_path", p, "channel");
      cfg.import_path = p;
    }
  }
  if (doc.contains("selection")) {
    const json& s = doc["selection"];
    reject_unknown(s, "selection", {"n_s", "r_sel", "gamma"});
    read(s, "n_s", cfg.n_s, "selection");
    read(s, "r_sel", cfg.r_sel, "selection");
    if (s.contains("gamma")) cfg.gamma = read_number_list(s["gamma"], "selection.gamma");
  }
  if (doc.contains("link")) {
    const json& l = doc["link"];
    reject_unknown(l, "link", {"snr_db", "tx_power"});
    if (l.contains("snr_db")) cfg.snr_db = read_number_list(l["snr_db"], "link.snr_db");
    read(l, "tx_power", cfg.tx_power, "link");
  }
  if (doc.contains("run")) {
    const json& r = doc["run"];
    reject_unknown(r, "run", {"algorithms", "realizations", "seed", "budget"});
    if (r.contains("algorithms")) {
      std::vector<std::string> names;
      read(r, "algorithms", names, "run");
      cfg.algorithms.clear();
      for (const auto& n : names) cfg.algorithms.push_back(parse_algorithm(n));
    }
    read(r, "realizations", cfg.realizations, "run");
    read(r, "seed", cfg.seed, "run");
    read(r, "budget", cfg.budget, "run");
  }
  if (cfg.import_path && !(doc.contains("run") && doc["run"].contains("realizations"))) {
    cfg.realizations = 1;
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
  json channel = {{"num_users", cfg.channel.num_users},
                  {"n_t", cfg.channel.n_t},
                  {"n_r", cfg.channel.n_r},
                  {"num_paths", cfg.channel.num_paths},
                  {"tx_geometry", geometry_to_json(cfg.channel.tx_array())},
                  {"rx_geometry", geometry_to_json(cfg.channel.rx_array())}};
  if (cfg.import_path) channel["import_path"] = cfg.import_path->string();
  std::vector<std::string> algos;
  for (Algorithm a : cfg.algorithms) algos.emplace_back(algorithm_name(a));
  return {{"channel", channel},
          {"selection", {{"n_s", cfg.n_s}, {"r_sel", cfg.r_sel}, {"gamma", cfg.gamma}}},
          {"link", {{"snr_db", cfg.snr_db}, {"tx_power", cfg.tx_power}}},
          {"run",
           {{"algorithms", algos},
            {"realizations", cfg.realizations},
            {"seed", cfg.seed},
            {"budget", cfg.budget}}}};
}

ChannelSet realization_channels(const ExperimentConfig& cfg, int realization) {
  if (cfg.import_path) return load_channels(*cfg.import_path);
  SVChannelConfig c = cfg.channel;
  c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(realization));
  return generate_sv_channels(c);
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  // Canonical algorithm order, duplicates dropped.
  std::set<Algorithm> algos(cfg.algorithms.begin(), cfg.algorithms.end());
  const GainConstraint gains = cfg.gain_constraint();

  std::vector<RunRecord> records;
  for (int r = 0; r < cfg.realizations; ++r) {
    const Realization rz = prepare(cfg, r, cfg.r_sel);
    if (cfg.n_s > rz.cand.r_sel()) throw ConfigError("config: n_s exceeds r_sel");
    for (double snr : cfg.snr_db) {
      const LinkBudget link = LinkBudget::from_snr_db(snr, cfg.tx_power);
      for (Algorithm algo : algos) {
        const SelectionResult res = select(algo, cfg, rz.channels, rz.cand, cfg.n_s, gains, link);
        RunRecord rec;
        rec.algorithm = algo;
        rec.realization = r;
        rec.snr_db = snr;
        rec.se_bps_hz = spectral_efficiency(rz.channels, res, link);
        rec.objective = res.objective_value;
        rec.combinations = res.combinations_evaluated;
        rec.select_ms = to_ms(res.elapsed);
        rec.svd_ms = rz.svd_ms;
        rec.feasible = res.feasible;
        rec.config_fingerprint = rz.channels.config_fingerprint();
        rec.seed = rz.channels.seed().value_or(0);
        if (rec.combinations != predicted_count(algo, cfg.r_sel, cfg.n_s, rz.cand.users())) {
          throw NumericalError("run: combination count disagrees with the analytic count");
        }
        records.push_back(rec);
      }
    }
  }
  return records;
}

std::pair<std::size_t, std::size_t> GammaSweep::argmax() const {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mean_se.rows(); ++i) {
    for (Eigen::Index j = 0; j < mean_se.cols(); ++j) {
      if (mean_se(i, j) > best) {
        best = mean_se(i, j);
        row = i;
        col = j;
      }
    }
  }
  return {static_cast<std::size_t>(row), static_cast<std::size_t>(col)};
}

bool GammaSweep::argmax_near(double g1, double g2, int steps) const {
  const auto nearest = [](const std::vector<double>& grid, double v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (std::abs(grid[i] - v) < std::abs(grid[best] - v)) best = i;
    }
    return static_cast<long>(best);
  };
  const auto [row, col] = argmax();
  return std::abs(static_cast<long>(row) - nearest(gamma1, g1)) <= steps &&
         std::abs(static_cast<long>(col) - nearest(gamma2, g2)) <= steps;
}

GammaSweep sweep_gamma(const ExperimentConfig& cfg, std::span<const double> gamma1_grid,
                       std::span<const double> gamma2_grid) {
  cfg.validate();
  if (cfg.n_s != 2) throw ConfigError("sweep-gamma: the two-threshold sweep requires n_s = 2");
  if (gamma1_grid.empty() || gamma2_grid.empty()) throw ConfigError("sweep-gamma: empty gamma grid");
  for (double g : gamma1_grid) (void)GainConstraint(g);
  for (double g : gamma2_grid) (void)GainConstraint(g);

  GammaSweep sweep;
  sweep.gamma1.assign(gamma1_grid.begin(), gamma1_grid.end());
  sweep.gamma2.assign(gamma2_grid.begin(), gamma2_grid.end());
  sweep.snr_db = cfg.snr_db.front();
  sweep.mean_se = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gamma1_grid.size()),
                                        static_cast<Eigen::Index>(gamma2_grid.size()));
  const LinkBudget link = LinkBudget::from_snr_db(sweep.snr_db, cfg.tx_power);

  for (int r = 0; r < cfg.realizations; ++r) {
    const Realization rz = prepare(cfg, r, cfg.r_sel);
    for (std::size_t i = 0; i < gamma1_grid.size(); ++i) {
      for (std::size_t j = 0; j < gamma2_grid.size(); ++j) {
        const GainConstraint schedule(std::vector<double>{gamma1_grid[i], gamma2_grid[j]});
        const SelectionResult res = g_iosvb(rz.cand, cfg.n_s, schedule);
        sweep.mean_se(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            spectral_efficiency(rz.channels, res, link);
      }
    }
  }
  sweep.mean_se /= static_cast<double>(cfg.realizations);
  return sweep;
}

std::vector<GridCell> sweep_grid(const ExperimentConfig& cfg, std::span<const int> r_sel_values,
                                 std::span<const int> n_s_values) {
  cfg.validate();
  const GainConstraint gains(cfg.gamma.front());
  const LinkBudget link = LinkBudget::from_snr_db(cfg.snr_db.front(), cfg.tx_power);

  std::vector<GridCell> cells;
  for (int r_sel : r_sel_values) {
    for (int n_s : n_s_values) {
      if (n_s < 1 || n_s > r_sel) continue;
      for (Algorithm algo : {Algorithm::Iosvb, Algorithm::GIosvb}) {
        GridCell cell;
        cell.r_sel = r_sel;
        cell.n_s = n_s;
        cell.algorithm = algo;
        cells.push_back(cell);
      }
    }
  }
  // Exhaustive budget check up front so a bad cell fails before any work.
  const int users = cfg.import_path ? realization_channels(cfg, 0).num_users() : cfg.channel.num_users;
  for (const GridCell& cell : cells) {
    if (cell.algorithm == Algorithm::Iosvb &&
        n_iter_exhaustive(cell.r_sel, cell.n_s, users) > cfg.budget) {
      throw BudgetError("sweep-grid: cell r_sel=" + std::to_string(cell.r_sel) + ", n_s=" +
                        std::to_string(cell.n_s) + " exceeds the search budget");
    }
  }

  for (int r = 0; r < cfg.realizations; ++r) {
    const ChannelSet channels = realization_channels(cfg, r);
    for (GridCell& cell : cells) {
      // Decompose per R_sel; cheap next to the searches.
      const CandidateBeams cand = decompose(channels, cell.r_sel);
      const SelectionResult res = select(cell.algorithm, cfg, channels, cand, cell.n_s, gains, link);
      cell.mean_se += spectral_efficiency(channels, res, link);
      cell.mean_select_ms += to_ms(res.elapsed);
      cell.combinations = res.combinations_evaluated;
    }
  }
  for (GridCell& cell : cells) {
    cell.mean_se /= cfg.realizations;
    cell.mean_select_ms /= cfg.realizations;
  }
  return cells;
}

std::vector<IterationRow> report_iterations(std::span<const int> r_sel_values,
                                            std::span<const int> n_s_values, int users) {
  std::vector<IterationRow> rows;
  for (int n_s : n_s_values) {
    for (int r_sel : r_sel_values) {
      if (n_s > r_sel) continue;
      IterationRow row;
      row.n_s = n_s;
      row.r_sel = r_sel;
      row.users = users;
      row.n_exhaustive = n_iter_exhaustive(r_sel, n_s, users).str();
      row.n_greedy_direct = n_iter_greedy_direct(r_sel, n_s, users).str();
      row.n_greedy_closed = n_iter_greedy_closed(r_sel, n_s, users).str();
      row.gain_exact = gain_ratio_exact(r_sel, n_s, users);
      if (n_s < r_sel) row.gain_stirling = gain_ratio_stirling(r_sel, n_s, users);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_run_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "algo,realization,snr_db,se_bps_hz,objective,combinations,select_ms,svd_ms,feasible,seed\n";
  for (const RunRecord& r : records) {
    out << algorithm_name(r.algorithm) << ',' << r.realization << ',' << format_double(r.snr_db)
        << ',' << format_double(r.se_bps_hz) << ',' << format_double(r.objective) << ','
        << r.combinations << ',' << format_double(r.select_ms) << ',' << format_double(r.svd_ms)
        << ',' << (r.feasible ? "true" : "false") << ',' << r.seed << '\n';
  }
}

void write_gamma_csv(std::ostream& out, const GammaSweep& sweep) {
  out << "gamma1,gamma2,mean_se\n";
  for (std::size_t i = 0; i < sweep.gamma1.size(); ++i) {
    for (std::size_t j = 0; j < sweep.gamma2.size(); ++j) {
      out << format_double(sweep.gamma1[i]) << ',' << format_double(sweep.gamma2[j]) << ','
          << format_double(sweep.mean_se(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
          << '\n';
    }
  }
}

void write_grid_csv(std::ostream& out, std::span<const GridCell> cells) {
  out << "r_sel,n_s,algo,mean_se,mean_select_ms,combinations\n";
  for (const GridCell& c : cells) {
    out << c.r_sel << ',' << c.n_s << ',' << algorithm_name(c.algorithm) << ','
        << format_double(c.mean_se) << ',' << format_double(c.mean_select_ms) << ','
        << c.combinations << '\n';
  }
}

void write_iterations_csv(std::ostream& out, std::span<const IterationRow> rows) {
  out << "n_s,r_sel,u,n_exhaustive,n_greedy_direct,n_greedy_closed,gain_exact,gain_stirling\n";
  for (const IterationRow& r : rows) {
    out << r.n_s << ',' << r.r_sel << ',' << r.users << ',' << r.n_exhaustive << ','
        << r.n_greedy_direct << ',' << r.n_greedy_closed << ',' << format_double(r.gain_exact)
        << ',' << (r.gain_stirling ? format_double(*r.gain_stirling) : "nan") << '\n';
  }
}

}  // namespace beamsel
