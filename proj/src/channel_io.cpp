#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "beamsel/channel.hpp"
#include "beamsel/errors.hpp"

namespace beamsel {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kEncodingBinary = "interleaved-f64-le";
constexpr const char* kEncodingInline = "json-inline";

void put_f64_le(std::string& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xffU));
    bits >>= 8;
  }
}

double get_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | p[i];
  }
  return std::bit_cast<double>(bits);
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xfU];
    v >>= 4;
  }
  return s;
}

std::uint64_t parse_hex64(const std::string& s, const std::filesystem::path& path) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used, 16);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ParseError(path.string() + ": config_fingerprint is not a hex string");
  }
  return v;
}

Complex checked_entry(double re, double im, const std::filesystem::path& path, int user, long row,
                      long col) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw ParseError(path.string() + ": user " + std::to_string(user) + " entry (" +
                     std::to_string(row) + "," + std::to_string(col) + ") is not finite");
  }
  return {re, im};
}

template <typename T>
T require(const json& manifest, const char* key, const std::filesystem::path& path) {
  if (!manifest.contains(key)) {
    throw ParseError(path.string() + ": manifest is missing \"" + key + "\"");
  }
  try {
    return manifest.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(path.string() + ": manifest field \"" + key + "\" has the wrong type");
  }
}

}  // namespace

void save_channels(const ChannelSet& set, const std::filesystem::path& manifest_path,
                   ChannelEncoding encoding) {
  json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["num_users"] = set.num_users();
  manifest["n_r"] = set.n_r();
  manifest["n_t"] = set.n_t();
  manifest["config_fingerprint"] = hex64(set.config_fingerprint());
  if (set.seed()) manifest["seed"] = *set.seed();

  if (encoding == ChannelEncoding::InterleavedF64LE) {
    std::filesystem::path data_path = manifest_path;
    data_path.replace_extension(".bin");
    manifest["encoding"] = kEncodingBinary;
    manifest["data_file"] = data_path.filename().string();

    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(set.num_users()) * set.n_r() * set.n_t() * 16);
    for (const CMatrix& h : set.matrices()) {
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
          put_f64_le(bytes, h(r, c).real());
          put_f64_le(bytes, h(r, c).imag());
        }
      }
    }
    std::ofstream data(data_path, std::ios::binary | std::ios::trunc);
    if (!data || !data.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
      throw ParseError(data_path.string() + ": cannot write channel data");
    }
  } else {
    manifest["encoding"] = kEncodingInline;
    json users = json::array();
    for (const CMatrix& h : set.matrices()) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
          row.push_back(json::array({h(r, c).real(), h(r, c).imag()}));
        }
        rows.push_back(std::move(row));
      }
      users.push_back(std::move(rows));
    }
    manifest["matrices"] = std::move(users);
  }

  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out || !(out << manifest.dump(2) << '\n')) {
    throw ParseError(manifest_path.string() + ": cannot write channel manifest");
  }
}

ChannelSet load_channels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open channel manifest");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!manifest.is_object()) throw ParseError(path.string() + ": manifest must be an object");

  const int version = require<int>(manifest, "format_version", path);
  if (version != kFormatVersion) {
    throw ParseError(path.string() + ": unsupported format_version " + std::to_string(version));
  }
  const int users = require<int>(manifest, "num_users", path);
  const int n_r = require<int>(manifest, "n_r", path);
  const int n_t = require<int>(manifest, "n_t", path);
  const auto encoding = require<std::string>(manifest, "encoding", path);
  if (users < 1 || n_r < 1 || n_t < 1) {
    throw ParseError(path.string() + ": num_users, n_r and n_t must be positive");
  }

  std::uint64_t fingerprint = 0;
  if (manifest.contains("config_fingerprint")) {
    fingerprint = parse_hex64(require<std::string>(manifest, "config_fingerprint", path), path);
  }
  std::optional<std::uint64_t> seed;
  if (manifest.contains("seed")) seed = require<std::uint64_t>(manifest, "seed", path);

  std::vector<CMatrix> matrices;
  matrices.reserve(static_cast<std::size_t>(users));

  if (encoding == kEncodingBinary) {
    const auto data_name = require<std::string>(manifest, "data_file", path);
    const auto data_path = path.parent_path() / data_name;
    std::ifstream data(data_path, std::ios::binary);
    if (!data) throw ParseError(data_path.string() + ": cannot open channel data");
    const std::string bytes((std::istreambuf_iterator<char>(data)), std::istreambuf_iterator<char>());
    const std::size_t per_user = static_cast<std::size_t>(n_r) * n_t * 16;
    const std::size_t expected = per_user * static_cast<std::size_t>(users);
    if (bytes.size() != expected) {
      throw ParseError(data_path.string() + ": expected " + std::to_string(expected) +
                       " bytes for " + std::to_string(users) + " users, found " +
                       std::to_string(bytes.size()) + " (" +
                       std::to_string(bytes.size() / per_user) + " complete matrices)");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    for (int k = 0; k < users; ++k) {
      CMatrix h(n_r, n_t);
      for (int r = 0; r < n_r; ++r) {
        for (int c = 0; c < n_t; ++c, p += 16) {
          h(r, c) = checked_entry(get_f64_le(p), get_f64_le(p + 8), data_path, k, r, c);
        }
      }
      matrices.push_back(std::move(h));
    }
  } else if (encoding == kEncodingInline) {
    if (!manifest.contains("matrices") || !manifest["matrices"].is_array()) {
      throw ParseError(path.string() + ": json-inline manifest needs a \"matrices\" array");
    }
    const json& list = manifest["matrices"];
    if (list.size() != static_cast<std::size_t>(users)) {
      throw ParseError(path.string() + ": num_users is " + std::to_string(users) + " but " +
                       std::to_string(list.size()) + " matrices are present");
    }
    for (int k = 0; k < users; ++k) {
      const json& rows = list[static_cast<std::size_t>(k)];
      if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n_r)) {
        throw ParseError(path.string() + ": user " + std::to_string(k) + " must have " +
                         std::to_string(n_r) + " rows");
      }
      CMatrix h(n_r, n_t);
      for (int r = 0; r < n_r; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n_t)) {
          throw ParseError(path.string() + ": user " + std::to_string(k) + " row " +
                           std::to_string(r) + " must have " + std::to_string(n_t) + " entries");
        }
        for (int c = 0; c < n_t; ++c) {
          const json& e = row[static_cast<std::size_t>(c)];
          if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ParseError(path.string() + ": user " + std::to_string(k) + " entry (" +
                             std::to_string(r) + "," + std::to_string(c) +
                             ") must be a [re, im] pair");
          }
          h(r, c) = checked_entry(e[0].get<double>(), e[1].get<double>(), path, k, r, c);
        }
      }
      matrices.push_back(std::move(h));
    }
  } else {
    throw ParseError(path.string() + ": unknown encoding \"" + encoding + "\"");
  }

  return ChannelSet(std::move(matrices), fingerprint, seed);
}

}  // namespace beamsel
