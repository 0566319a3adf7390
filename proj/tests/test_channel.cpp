#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "beamsel/channel.hpp"
#include "beamsel/errors.hpp"

using namespace beamsel;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("beamsel_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool identical(const ChannelSet& a, const ChannelSet& b) {
  if (a.num_users() != b.num_users() || a.n_r() != b.n_r() || a.n_t() != b.n_t()) return false;
  for (int k = 0; k < a.num_users(); ++k) {
    for (int i = 0; i < a.n_r(); ++i) {
      for (int j = 0; j < a.n_t(); ++j) {
        const auto x = a[k](i, j);
        const auto y = b[k](i, j);
        // Bitwise: == would also accept -0.0 vs 0.0.
        if (std::memcmp(&x, &y, sizeof x) != 0) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("steering vector: ULA broadside is uniform") {
  const CVector a = steering_vector(ArrayGeometry::ula(4), 0.0);
  REQUIRE(a.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(a[i].real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(a[i].imag()) < 1e-15);
  }
}

TEST_CASE("steering vector: ULA endfire at half-wavelength spacing") {
  const CVector a = steering_vector(ArrayGeometry::ula(2, 0.5), std::numbers::pi / 2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(a[0] - Complex(s, 0.0)) < 1e-12);
  CHECK(std::abs(a[1] - Complex(-s, 0.0)) < 1e-12);
}

TEST_CASE("steering vector: unit norm for random angles and geometries") {
  Rng rng(5);
  const ArrayGeometry geometries[] = {ArrayGeometry::ula(1), ArrayGeometry::ula(16),
                                      ArrayGeometry::ula(144, 0.3), ArrayGeometry::upa(12, 12),
                                      ArrayGeometry::upa(4, 2, 0.7)};
  for (const auto& g : geometries) {
    for (int trial = 0; trial < 50; ++trial) {
      const CVector a = steering_vector(g, rng.uniform(-3.0, 3.0), rng.uniform(-1.5, 1.5));
      CHECK(std::abs(a.norm() - 1.0) <= 1e-12);
      CHECK(std::abs(a.dot(a) - Complex(1.0, 0.0)) <= 1e-12);
      for (int i = 0; i < a.size(); ++i) {
        CHECK(std::abs(std::abs(a[i]) - 1.0 / std::sqrt(double(g.element_count))) < 1e-14);
      }
    }
  }
}

TEST_CASE("array geometry validation") {
  CHECK_THROWS_AS(steering_vector(ArrayGeometry::ula(0), 0.0), ConfigError);
  CHECK_THROWS_AS(ArrayGeometry::ula(4, 0.0).validate(), ConfigError);
  ArrayGeometry bad = ArrayGeometry::upa(3, 4);
  bad.element_count = 13;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(steering_vector(ArrayGeometry::ula(4), std::nan("")), ConfigError);

  SVChannelConfig cfg;
  cfg.tx_geometry = ArrayGeometry::upa(12, 12);
  CHECK_NOTHROW(cfg.validate());
  cfg.tx_geometry = ArrayGeometry::upa(10, 12);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tx_geometry.reset();
  cfg.num_paths = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("generate_sv_channels: reference scenario shapes") {
  SVChannelConfig cfg;  // U=5, N_t=144, N_r=16, L=50
  cfg.seed = 3;
  const ChannelSet set = generate_sv_channels(cfg);
  CHECK(set.num_users() == 5);
  CHECK(set.n_r() == 16);
  CHECK(set.n_t() == 144);
  CHECK(set.seed() == 3u);
  CHECK(set.config_fingerprint() == cfg.fingerprint());
}

TEST_CASE("single unit-gain path gives a rank-1 channel with Frobenius norm sqrt(Nt*Nr)") {
  const auto tx = ArrayGeometry::ula(12);
  const auto rx = ArrayGeometry::upa(2, 3);
  const PropagationPath path{Complex(1.0, 0.0), 0.3, 0.0, -0.7, 0.2};
  const CMatrix h = sv_channel_from_paths(tx, rx, std::span(&path, 1));
  CHECK(std::abs(h.norm() - std::sqrt(12.0 * 6.0)) <= 1e-9);
  Eigen::JacobiSVD<CMatrix> svd(h);
  CHECK(svd.singularValues()[1] <= 1e-9 * svd.singularValues()[0]);
}

TEST_CASE("generation is deterministic in the seed") {
  SVChannelConfig cfg;
  cfg.seed = 42;
  CHECK(identical(generate_sv_channels(cfg), generate_sv_channels(cfg)));
  SVChannelConfig other = cfg;
  other.seed = 43;
  CHECK_FALSE(identical(generate_sv_channels(cfg), generate_sv_channels(other)));
}

TEST_CASE("per-user draws depend only on (seed, user)") {
  SVChannelConfig cfg;
  cfg.seed = 11;
  cfg.num_users = 2;
  const ChannelSet two = generate_sv_channels(cfg);
  cfg.num_users = 4;
  const ChannelSet four = generate_sv_channels(cfg);
  CHECK(two[1] == four[1]);
}

TEST_CASE("normalization: E||H||_F^2 = Nt*Nr over 1000 realizations") {
  SVChannelConfig cfg;
  cfg.num_users = 1;
  cfg.n_t = 16;
  cfg.n_r = 4;
  cfg.num_paths = 50;
  double mean = 0.0;
  const int n = 1000;
  for (int r = 0; r < n; ++r) {
    cfg.seed = derive_seed(77, r);
    mean += generate_sv_channels(cfg)[0].squaredNorm() / (cfg.n_t * cfg.n_r);
  }
  mean /= n;
  CHECK(std::abs(mean - 1.0) < 0.05);
}

TEST_CASE("complex normal draws have unit variance and independent parts") {
  Rng rng(1234);
  const int n = 200000;
  double re2 = 0.0, im2 = 0.0, cross = 0.0, mean_re = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex z = rng.complex_normal();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
    mean_re += z.real();
  }
  CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(im2 / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(cross / n) < 0.01);
  CHECK(std::abs(mean_re / n) < 0.01);
}

TEST_CASE("ChannelSet rejects inconsistent input") {
  CHECK_THROWS_AS(ChannelSet({}), ConfigError);
  CHECK_THROWS_AS(ChannelSet({CMatrix::Zero(2, 3), CMatrix::Zero(3, 2)}), ConfigError);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(1, 1) = Complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(ChannelSet({bad}), ConfigError);
}

TEST_CASE("channel files: binary round trip is exact") {
  const fs::path dir = scratch_dir("bin");
  SVChannelConfig cfg;
  cfg.seed = 8;
  const ChannelSet set = generate_sv_channels(cfg);
  save_channels(set, dir / "set.json");
  CHECK(fs::file_size(dir / "set.bin") == 5u * 16 * 144 * 16);
  const ChannelSet back = load_channels(dir / "set.json");
  CHECK(identical(set, back));
  CHECK(back.seed() == set.seed());
  CHECK(back.config_fingerprint() == set.config_fingerprint());
}

TEST_CASE("channel files: json-inline round trip is exact") {
  const fs::path dir = scratch_dir("inline");
  SVChannelConfig cfg;
  cfg.num_users = 2;
  cfg.n_t = 6;
  cfg.n_r = 3;
  cfg.seed = 19;
  const ChannelSet set = generate_sv_channels(cfg);
  save_channels(set, dir / "set.json", ChannelEncoding::JsonInline);
  CHECK_FALSE(fs::exists(dir / "set.bin"));
  CHECK(identical(set, load_channels(dir / "set.json")));
}

TEST_CASE("channel files: 1x1 minimal case, both encodings") {
  const fs::path dir = scratch_dir("one");
  CMatrix h(1, 1);
  h(0, 0) = Complex(3.0, 4.0);
  const ChannelSet set({h});
  for (auto enc : {ChannelEncoding::InterleavedF64LE, ChannelEncoding::JsonInline}) {
    save_channels(set, dir / "one.json", enc);
    const ChannelSet back = load_channels(dir / "one.json");
    CHECK(back[0](0, 0) == Complex(3.0, 4.0));
    CHECK_FALSE(back.seed().has_value());
  }
}

TEST_CASE("channel files: hand-written json-inline manifest") {
  const fs::path dir = scratch_dir("hand");
  std::ofstream(dir / "m.json") << R"({"format_version": 1, "num_users": 1, "n_r": 1, "n_t": 2,
    "encoding": "json-inline", "matrices": [[[[1.5, -2], [0, 0.25]]]]})";
  const ChannelSet set = load_channels(dir / "m.json");
  CHECK(set[0](0, 0) == Complex(1.5, -2.0));
  CHECK(set[0](0, 1) == Complex(0.0, 0.25));
}

TEST_CASE("channel files: declared user count larger than content") {
  const fs::path dir = scratch_dir("mismatch");
  std::ofstream(dir / "m.json") << R"({"format_version": 1, "num_users": 2, "n_r": 1, "n_t": 1,
    "encoding": "json-inline", "matrices": [[[[1, 0]]]]})";
  CHECK_THROWS_AS(load_channels(dir / "m.json"), ParseError);

  // Binary: a sidecar holding one 1x1 matrix for a manifest declaring two.
  const ChannelSet one({CMatrix::Ones(1, 1)});
  save_channels(one, dir / "b.json");
  std::ifstream in(dir / "b.json");
  auto manifest = nlohmann::json::parse(in);
  manifest["num_users"] = 2;
  std::ofstream(dir / "b.json") << manifest.dump();
  try {
    load_channels(dir / "b.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("2 users") != std::string::npos);
  }
}

TEST_CASE("channel files: malformed inputs name the problem") {
  const fs::path dir = scratch_dir("malformed");
  CHECK_THROWS_AS(load_channels(dir / "missing.json"), ParseError);

  std::ofstream(dir / "syntax.json") << "{ not json";
  CHECK_THROWS_AS(load_channels(dir / "syntax.json"), ParseError);

  std::ofstream(dir / "nokey.json") << R"({"format_version": 1, "num_users": 1, "n_r": 1})";
  try {
    load_channels(dir / "nokey.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("n_t") != std::string::npos);
  }

  std::ofstream(dir / "ver.json") << R"({"format_version": 2, "num_users": 1, "n_r": 1, "n_t": 1,
    "encoding": "json-inline", "matrices": [[[[1, 0]]]]})";
  CHECK_THROWS_AS(load_channels(dir / "ver.json"), ParseError);

  std::ofstream(dir / "nan.json") << R"({"format_version": 1, "num_users": 1, "n_r": 1, "n_t": 2,
    "encoding": "json-inline", "matrices": [[[[1, 0], [null, 0]]]]})";
  try {
    load_channels(dir / "nan.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
  }

  // Non-finite value inside a binary sidecar.
  const ChannelSet ok({CMatrix::Ones(1, 2)});
  save_channels(ok, dir / "inf.json");
  {
    std::fstream bin(dir / "inf.bin", std::ios::in | std::ios::out | std::ios::binary);
    const double inf = std::numeric_limits<double>::infinity();
    bin.seekp(16);
    bin.write(reinterpret_cast<const char*>(&inf), sizeof inf);  // little-endian host
  }
  try {
    load_channels(dir / "inf.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("user 0 entry (0,1)") != std::string::npos);
  }
}
