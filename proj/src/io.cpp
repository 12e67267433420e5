#include "mochlab/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mochlab/error.hpp"

namespace mochlab {

static_assert(std::endian::native == std::endian::little,
              "snapshot encoding assumes a little-endian host");

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write output path: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot write output path: " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "input not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

template <class T>
void put(std::string& out, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  out.append(raw, sizeof(T));
}

template <class T>
T get(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) fail(ErrorKind::Format, "snapshot truncated");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string encode_snapshot(const RealField& f) {
  std::string out;
  out.reserve(24 + 8 * f.size());
  out.append("MOCH", 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint64_t>(out, f.size());
  put<double>(out, f.grid().period());
  for (double v : f.samples()) put<double>(out, v);
  return out;
}

RealField decode_snapshot(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "MOCH")
    fail(ErrorKind::Format, "not a field snapshot (bad magic)");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion)
    fail(ErrorKind::Format, "unsupported snapshot version " + std::to_string(version));
  const auto n = get<std::uint64_t>(bytes, pos);
  const auto period = get<double>(bytes, pos);
  if (bytes.size() != pos + 8 * n) fail(ErrorKind::Format, "snapshot length does not match header");
  Grid grid = Grid::make(static_cast<std::size_t>(n), period);
  std::vector<double> samples(n);
  std::memcpy(samples.data(), bytes.data() + pos, 8 * n);
  return RealField(grid, std::move(samples));
}

void write_snapshot(const std::filesystem::path& path, const RealField& f) {
  write_file_atomic(path, encode_snapshot(f));
}

RealField read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_file(path)); }

std::string field_to_csv(const RealField& f) {
  std::string out = "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += format_double(f.grid().node(i));
    out += ',';
    out += format_double(f[i]);
    out += '\n';
  }
  return out;
}

}  // namespace mochlab
