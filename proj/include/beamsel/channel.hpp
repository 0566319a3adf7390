#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace beamsel {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer applied to (seed, index). Used to derive independent
/// per-user and per-realization streams from one experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/**
 * Seeded generator for channel synthesis.
 *
 * Engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The std:: distributions are implementation-defined, so the
 * uniform and Gaussian transforms are done here by hand to keep generated
 * channels bit-identical across standard libraries.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Circularly-symmetric complex Gaussian CN(0, 1): real and imaginary
  /// parts are independent N(0, 1/2), drawn as one Box-Muller pair.
  Complex complex_normal() noexcept;

private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Array geometry
// ---------------------------------------------------------------------------

struct ArrayGeometry {
  enum class Kind { UniformLinear, UniformPlanar };

  Kind kind = Kind::UniformLinear;
  int element_count = 1;
  /// In wavelengths.
  double element_spacing = 0.5;
  /// Planar arrays only; rows * cols == element_count.
  int rows = 1;
  int cols = 1;

  static ArrayGeometry ula(int elements, double spacing = 0.5);
  static ArrayGeometry upa(int rows, int cols, double spacing = 0.5);

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

/**
 * Array response with unit Euclidean norm.
 *
 * ULA element n has phase 2*pi*d*n*sin(azimuth); elevation is ignored.
 * UPA element (r, c), stored at r*cols + c, has phase
 * 2*pi*d*(c*sin(azimuth)*cos(elevation) + r*sin(elevation)).
 */
CVector steering_vector(const ArrayGeometry& geometry, double azimuth, double elevation = 0.0);

// ---------------------------------------------------------------------------
// Saleh-Valenzuela generator
// ---------------------------------------------------------------------------

struct SVChannelConfig {
  int num_users = 5;
  int n_t = 144;
  int n_r = 16;
  int num_paths = 50;
  /// Defaults to a half-wavelength ULA with n_t / n_r elements.
  std::optional<ArrayGeometry> tx_geometry;
  std::optional<ArrayGeometry> rx_geometry;
  std::uint64_t seed = 0;

  ArrayGeometry tx_array() const;
  ArrayGeometry rx_array() const;
  void validate() const;
  /// FNV-1a over every generating parameter except the seed.
  std::uint64_t fingerprint() const;
};

struct PropagationPath {
  Complex gain;
  double departure_azimuth = 0.0;
  double departure_elevation = 0.0;
  double arrival_azimuth = 0.0;
  double arrival_elevation = 0.0;
};

/// Path parameters for one user, drawn from derive_seed(cfg.seed, user).
/// All angles are uniform on [-pi/2, pi/2).
std::vector<PropagationPath> draw_paths(const SVChannelConfig& cfg, int user);

/// sqrt(Nt*Nr/L) * sum_l gain_l * a_r(arrival_l) * a_t(departure_l)^H
CMatrix sv_channel_from_paths(const ArrayGeometry& tx, const ArrayGeometry& rx,
                              std::span<const PropagationPath> paths);

/// Immutable set of per-user channel matrices, each n_r x n_t.
class ChannelSet {
public:
  /// Throws ConfigError on an empty set, mismatched dimensions, or
  /// non-finite entries.
  explicit ChannelSet(std::vector<CMatrix> matrices, std::uint64_t config_fingerprint = 0,
                      std::optional<std::uint64_t> seed = std::nullopt);

  int num_users() const noexcept { return static_cast<int>(matrices_.size()); }
  int n_r() const noexcept { return static_cast<int>(matrices_.front().rows()); }
  int n_t() const noexcept { return static_cast<int>(matrices_.front().cols()); }

  const CMatrix& operator[](int user) const { return matrices_.at(static_cast<std::size_t>(user)); }
  const std::vector<CMatrix>& matrices() const noexcept { return matrices_; }

  std::uint64_t config_fingerprint() const noexcept { return fingerprint_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

private:
  std::vector<CMatrix> matrices_;
  std::uint64_t fingerprint_;
  std::optional<std::uint64_t> seed_;
};

ChannelSet generate_sv_channels(const SVChannelConfig& cfg);

// ---------------------------------------------------------------------------
// Channel files
// ---------------------------------------------------------------------------

enum class ChannelEncoding {
  /// JSON manifest plus a binary sidecar of little-endian (re, im) doubles.
  InterleavedF64LE,
  /// Everything inside the manifest as [re, im] pairs.
  JsonInline,
};

/// Writes the manifest at `manifest`. The binary sidecar, when used, sits
/// next to it with the extension replaced by ".bin". Throws ParseError on
/// I/O failure.
void save_channels(const ChannelSet& set, const std::filesystem::path& manifest,
                   ChannelEncoding encoding = ChannelEncoding::InterleavedF64LE);

/// Throws ParseError naming the offending record.
ChannelSet load_channels(const std::filesystem::path& manifest);

}  // namespace beamsel
