#include "vvl/snapshot_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vvl/error.hpp"

namespace vvl {

namespace {

constexpr char kMagic[4] = {'V', 'V', 'L', '1'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<std::size_t>(is.gcount()) == sizeof(T), ErrorCode::kIo, "truncated file: " + path);
  return to_little(v);
}

}  // namespace

void write_planes(const std::string& path, const PlaneFile& f) {
  const std::size_t n = static_cast<std::size_t>(f.nx) * f.ny;
  for (const auto& p : f.planes) require(p.size() == n, ErrorCode::kMismatch, "plane size does not match nx*ny");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorCode::kIo, "cannot open for writing: " + path);
  os.write(kMagic, 4);
  put(os, f.nx);
  put(os, f.ny);
  put(os, f.time);
  put(os, f.epsilon);
  for (const auto& p : f.planes)
    for (double v : p) put(os, v);
  os.flush();
  require(static_cast<bool>(os), ErrorCode::kIo, "write failed: " + path);
}

PlaneFile read_planes(const std::string& path, std::size_t expected_planes) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::kIo, "cannot open: " + path);
  char magic[4] = {};
  is.read(magic, 4);
  require(is.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::kIo, "bad magic in " + path);
  PlaneFile f;
  f.nx = get<std::uint32_t>(is, path);
  f.ny = get<std::uint32_t>(is, path);
  f.time = get<double>(is, path);
  f.epsilon = get<double>(is, path);
  const std::size_t n = static_cast<std::size_t>(f.nx) * f.ny;
  f.planes.assign(expected_planes, std::vector<double>(n));
  for (auto& p : f.planes)
    for (double& v : p) v = get<double>(is, path);
  is.peek();
  require(is.eof(), ErrorCode::kIo, "trailing bytes in " + path);
  return f;
}

void write_snapshot(const std::string& path, const FluidState& s, const Grid& grid, double epsilon) {
  require(s.size() == grid.size(), ErrorCode::kMismatch, "state size does not match the grid");
  PlaneFile f;
  f.nx = static_cast<std::uint32_t>(grid.nx());
  f.ny = static_cast<std::uint32_t>(grid.ny());
  f.time = s.time;
  f.epsilon = epsilon;
  f.planes = {s.rho, s.mx, s.my};
  write_planes(path, f);
}

FluidState read_snapshot(const std::string& path, const Grid& grid, double* epsilon) {
  PlaneFile f = read_planes(path, 3);
  require(f.nx == static_cast<std::uint32_t>(grid.nx()) && f.ny == static_cast<std::uint32_t>(grid.ny()),
          ErrorCode::kMismatch, "snapshot grid size differs from the configured grid: " + path);
  FluidState s;
  s.time = f.time;
  s.rho = std::move(f.planes[0]);
  s.mx = std::move(f.planes[1]);
  s.my = std::move(f.planes[2]);
  if (epsilon) *epsilon = f.epsilon;
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_index(const std::string& path, std::span<const IndexEntry> entries) {
  std::ofstream os(path, std::ios::trunc);
  require(static_cast<bool>(os), ErrorCode::kIo, "cannot open for writing: " + path);
  os << "member,epsilon,time,path\n";
  for (const auto& e : entries)
    os << e.member << ',' << format_double(e.epsilon) << ',' << format_double(e.time) << ',' << e.path << '\n';
  require(static_cast<bool>(os), ErrorCode::kIo, "write failed: " + path);
}

std::vector<IndexEntry> read_index(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::kIo, "cannot open: " + path);
  std::string line;
  std::getline(is, line);
  require(line == "member,epsilon,time,path", ErrorCode::kIo, "unexpected index header in " + path);
  std::vector<IndexEntry> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string member, eps, t, p;
    if (!std::getline(ls, member, ',') || !std::getline(ls, eps, ',') || !std::getline(ls, t, ',') ||
        !std::getline(ls, p))
      fail(ErrorCode::kIo, "malformed index row in " + path);
    try {
      out.push_back({std::stoi(member), std::stod(eps), std::stod(t), p});
    } catch (const std::exception&) {
      fail(ErrorCode::kIo, "malformed index row in " + path);
    }
  }
  return out;
}

}  // namespace vvl
