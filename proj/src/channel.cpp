#include "beamsel/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "beamsel/errors.hpp"

namespace beamsel {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Fnv1a {
public:
  void add(const void* data, std::size_t len) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void add(const T& value) noexcept {
    add(&value, sizeof(T));
  }
  std::uint64_t value() const noexcept { return hash_; }

private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

void hash_geometry(Fnv1a& h, const ArrayGeometry& g) {
  h.add(static_cast<int>(g.kind));
  h.add(g.element_count);
  h.add(g.element_spacing);
  h.add(g.rows);
  h.add(g.cols);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Complex Rng::complex_normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log(u1));  // sqrt(-2 ln u) * sqrt(1/2)
  const double angle = 2.0 * kPi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

ArrayGeometry ArrayGeometry::ula(int elements, double spacing) {
  ArrayGeometry g;
  g.kind = Kind::UniformLinear;
  g.element_count = elements;
  g.element_spacing = spacing;
  g.rows = 1;
  g.cols = elements;
  return g;
}

ArrayGeometry ArrayGeometry::upa(int rows, int cols, double spacing) {
  ArrayGeometry g;
  g.kind = Kind::UniformPlanar;
  g.element_count = rows * cols;
  g.element_spacing = spacing;
  g.rows = rows;
  g.cols = cols;
  return g;
}

void ArrayGeometry::validate() const {
  if (element_count < 1) {
    throw ConfigError("array geometry: element_count must be >= 1, got " +
                      std::to_string(element_count));
  }
  if (!(element_spacing > 0.0) || !std::isfinite(element_spacing)) {
    throw ConfigError("array geometry: element_spacing must be positive and finite");
  }
  if (kind == Kind::UniformPlanar && (rows < 1 || cols < 1 || rows * cols != element_count)) {
    throw ConfigError("array geometry: planar rows*cols (" + std::to_string(rows) + "*" +
                      std::to_string(cols) + ") != element_count " +
                      std::to_string(element_count));
  }
}

CVector steering_vector(const ArrayGeometry& geometry, double azimuth, double elevation) {
  geometry.validate();
  if (!std::isfinite(azimuth) || !std::isfinite(elevation)) {
    throw ConfigError("steering_vector: non-finite angle");
  }
  const int n = geometry.element_count;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double k = 2.0 * kPi * geometry.element_spacing;
  CVector a(n);
  if (geometry.kind == ArrayGeometry::Kind::UniformLinear) {
    const double step = k * std::sin(azimuth);
    for (int i = 0; i < n; ++i) {
      a[i] = std::polar(scale, step * i);
    }
  } else {
    const double col_step = k * std::sin(azimuth) * std::cos(elevation);
    const double row_step = k * std::sin(elevation);
    for (int r = 0; r < geometry.rows; ++r) {
      for (int c = 0; c < geometry.cols; ++c) {
        a[r * geometry.cols + c] = std::polar(scale, col_step * c + row_step * r);
      }
    }
  }
  return a;
}

ArrayGeometry SVChannelConfig::tx_array() const {
  return tx_geometry ? *tx_geometry : ArrayGeometry::ula(n_t);
}

ArrayGeometry SVChannelConfig::rx_array() const {
  return rx_geometry ? *rx_geometry : ArrayGeometry::ula(n_r);
}

void SVChannelConfig::validate() const {
  if (num_users < 1) throw ConfigError("channel: num_users must be >= 1");
  if (n_t < 1 || n_r < 1) throw ConfigError("channel: n_t and n_r must be >= 1");
  if (num_paths < 1) throw ConfigError("channel: num_paths must be >= 1");
  const ArrayGeometry tx = tx_array();
  const ArrayGeometry rx = rx_array();
  tx.validate();
  rx.validate();
  if (tx.element_count != n_t) {
    throw ConfigError("channel: tx geometry has " + std::to_string(tx.element_count) +
                      " elements but n_t = " + std::to_string(n_t));
  }
  if (rx.element_count != n_r) {
    throw ConfigError("channel: rx geometry has " + std::to_string(rx.element_count) +
                      " elements but n_r = " + std::to_string(n_r));
  }
}

std::uint64_t SVChannelConfig::fingerprint() const {
  Fnv1a h;
  h.add(num_users);
  h.add(n_t);
  h.add(n_r);
  h.add(num_paths);
  hash_geometry(h, tx_array());
  hash_geometry(h, rx_array());
  return h.value();
}

std::vector<PropagationPath> draw_paths(const SVChannelConfig& cfg, int user) {
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(user)));
  std::vector<PropagationPath> paths(static_cast<std::size_t>(cfg.num_paths));
  for (auto& p : paths) {
    p.gain = rng.complex_normal();
    p.departure_azimuth = rng.uniform(-kPi / 2, kPi / 2);
    p.departure_elevation = rng.uniform(-kPi / 2, kPi / 2);
    p.arrival_azimuth = rng.uniform(-kPi / 2, kPi / 2);
    p.arrival_elevation = rng.uniform(-kPi / 2, kPi / 2);
  }
  return paths;
}

CMatrix sv_channel_from_paths(const ArrayGeometry& tx, const ArrayGeometry& rx,
                              std::span<const PropagationPath> paths) {
  if (paths.empty()) throw ConfigError("channel: at least one propagation path required");
  const double norm = std::sqrt(static_cast<double>(tx.element_count) * rx.element_count /
                                static_cast<double>(paths.size()));
  CMatrix h = CMatrix::Zero(rx.element_count, tx.element_count);
  for (const auto& p : paths) {
    const CVector ar = steering_vector(rx, p.arrival_azimuth, p.arrival_elevation);
    const CVector at = steering_vector(tx, p.departure_azimuth, p.departure_elevation);
    h.noalias() += (p.gain * ar) * at.adjoint();
  }
  h *= norm;
  return h;
}

ChannelSet::ChannelSet(std::vector<CMatrix> matrices, std::uint64_t config_fingerprint,
                       std::optional<std::uint64_t> seed)
    : matrices_(std::move(matrices)), fingerprint_(config_fingerprint), seed_(seed) {
  if (matrices_.empty()) throw ConfigError("channel set: no users");
  const auto rows = matrices_.front().rows();
  const auto cols = matrices_.front().cols();
  if (rows < 1 || cols < 1) throw ConfigError("channel set: empty channel matrix");
  for (std::size_t k = 0; k < matrices_.size(); ++k) {
    const CMatrix& h = matrices_[k];
    if (h.rows() != rows || h.cols() != cols) {
      std::ostringstream os;
      os << "channel set: user " << k << " is " << h.rows() << "x" << h.cols() << ", expected "
         << rows << "x" << cols;
      throw ConfigError(os.str());
    }
    if (!h.allFinite()) {
      throw ConfigError("channel set: user " + std::to_string(k) + " has non-finite entries");
    }
  }
}

ChannelSet generate_sv_channels(const SVChannelConfig& cfg) {
  cfg.validate();
  const ArrayGeometry tx = cfg.tx_array();
  const ArrayGeometry rx = cfg.rx_array();
  std::vector<CMatrix> matrices;
  matrices.reserve(static_cast<std::size_t>(cfg.num_users));
  for (int k = 0; k < cfg.num_users; ++k) {
    const auto paths = draw_paths(cfg, k);
    matrices.push_back(sv_channel_from_paths(tx, rx, paths));
  }
  return ChannelSet(std::move(matrices), cfg.fingerprint(), cfg.seed);
}

}  // namespace beamsel
