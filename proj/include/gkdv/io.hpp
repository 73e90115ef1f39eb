#pragma once

// Report and data persistence. Every file goes through write_atomic
// (temporary file in the target directory, then rename).
//
// Binary container layout, all little-endian:
//   magic "GKDVPATH" | u32 format version | u32 byte-order mark 0x01020304
//   | f64 L | u64 N | f64 dt | u64 K | 32-byte normalization tag
//   | (K + 1) * N f64 samples, snapshot-major.
// A single Field is stored as a Path with K = 0.

#include <filesystem>
#include <string>
#include <vector>

#include "gkdv/spectral.hpp"

namespace gkdv::io {

inline constexpr std::uint32_t kContainerVersion = 1;
/// Coefficient of mode m is (-1)^m / N * DFT_m, x_j = -L/2 + j L / N.
inline constexpr const char* kNormalizationTag = "coef=(-1)^m/N*DFT;x0=-L/2";

void write_atomic(const std::filesystem::path& target, const std::string& content);
std::string read_file(const std::filesystem::path& source);

std::string encode_path(const Path& u);
Path decode_path(const std::string& bytes);
std::string encode_field(const Field& f);
Field decode_field(const std::string& bytes);

/// t,x,value rows.
std::string path_csv(const Path& u);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
std::string table_csv(const Table& t);

/// Shortest round-trip decimal form, identical across runs.
std::string format_number(double v);

}  // namespace gkdv::io
