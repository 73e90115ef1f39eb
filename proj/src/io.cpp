#include "gkdv/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "gkdv/error.hpp"

namespace gkdv::io {

namespace {

constexpr char kMagic[8] = {'G', 'K', 'D', 'V', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kByteOrderMark = 0x01020304;
constexpr std::size_t kTagBytes = 32;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

template <class T>
void put(std::string& out, T v) {
  const T le = to_little(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &le, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ValidationError("container truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return to_little(v);
}

}  // namespace

void write_atomic(const std::filesystem::path& target, const std::string& content) {
  namespace fs = std::filesystem;
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::filesystem::path& source) {
  std::ifstream is(source, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + source.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string encode_path(const Path& u) {
  const GridSpec& g = u.grid;
  std::string out;
  out.reserve(64 + u.snapshots.size() * g.points * 8);
  out.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kContainerVersion);
  put<std::uint32_t>(out, kByteOrderMark);
  put<double>(out, g.length);
  put<std::uint64_t>(out, g.points);
  put<double>(out, g.dt);
  put<std::uint64_t>(out, u.snapshots.empty() ? 0 : u.snapshots.size() - 1);
  std::string tag(kNormalizationTag);
  tag.resize(kTagBytes, '\0');
  out += tag;
  for (const auto& s : u.snapshots) {
    if (s.values.size() != g.points) throw ValidationError("encode_path: snapshot size differs from grid");
    for (double v : s.values) put<double>(out, v);
  }
  return out;
}

Path decode_path(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw ValidationError("not a path container (bad magic)");
  std::size_t pos = sizeof(kMagic);
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kContainerVersion) throw ValidationError("unsupported container version " + std::to_string(version));
  if (take<std::uint32_t>(bytes, pos) != kByteOrderMark) throw ValidationError("container byte-order mark mismatch");
  GridSpec g;
  g.length = take<double>(bytes, pos);
  g.points = take<std::uint64_t>(bytes, pos);
  g.dt = take<double>(bytes, pos);
  const auto steps = take<std::uint64_t>(bytes, pos);
  g.steps = steps == 0 ? 1 : steps;
  if (pos + kTagBytes > bytes.size()) throw ValidationError("container truncated");
  const std::string tag(bytes.data() + pos, std::strlen(kNormalizationTag));
  if (tag != kNormalizationTag) throw ValidationError("container normalization tag mismatch");
  pos += kTagBytes;
  if (bytes.size() - pos != (steps + 1) * g.points * sizeof(double)) throw ValidationError("container payload size mismatch");
  Path u{g, {}};
  u.snapshots.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    std::vector<double> v(g.points);
    for (auto& x : v) x = take<double>(bytes, pos);
    u.snapshots.emplace_back(g, std::move(v));
  }
  if (steps == 0) u.grid.steps = 0;
  return u;
}

std::string encode_field(const Field& f) { return encode_path(Path{f.grid, {f}}); }

Field decode_field(const std::string& bytes) {
  Path u = decode_path(bytes);
  if (u.snapshots.size() != 1) throw ValidationError("container holds a path, not a single field");
  return u.snapshots.front();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string path_csv(const Path& u) {
  std::string out = "t,x,value\n";
  for (std::size_t k = 0; k < u.snapshots.size(); ++k) {
    const std::string t = format_number(u.grid.time(k));
    const auto& s = u.snapshots[k];
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      out += t;
      out += ',';
      out += format_number(u.grid.x(j));
      out += ',';
      out += format_number(s.values[j]);
      out += '\n';
    }
  }
  return out;
}

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_number(r[i]);
    out += '\n';
  }
  return out;
}

}  // namespace gkdv::io
