#include "frsf/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "frsf/errors.hpp"

namespace frsf {

static_assert(std::endian::native == std::endian::little,
              "field format assumes a little-endian host");

namespace {
constexpr char kMagic[4] = {'F', 'R', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_field(const std::string& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  const std::uint32_t ver = kVersion, dim = f.grid.dim, m = f.grid.m;
  out.write(reinterpret_cast<const char*>(&ver), 4);
  out.write(reinterpret_cast<const char*>(&dim), 4);
  out.write(reinterpret_cast<const char*>(&m), 4);
  const double L = f.grid.half_length;
  out.write(reinterpret_cast<const char*>(&L), 8);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(double)) * f.values.size());
  if (!out) throw IoError("write failed: " + path);
}

Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad magic in " + path);
  std::uint32_t ver = 0, dim = 0, m = 0;
  double L = 0;
  in.read(reinterpret_cast<char*>(&ver), 4);
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&m), 4);
  in.read(reinterpret_cast<char*>(&L), 8);
  if (!in) throw IoError("truncated header in " + path);
  if (ver != kVersion) throw IoError("unsupported field format version in " + path);
  Grid g = make_grid(static_cast<int>(dim), static_cast<int>(m), L);
  Field f(g);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(sizeof(double)) * f.values.size());
  if (!in) throw IoError("truncated payload in " + path);
  return f;
}

}  // namespace frsf
