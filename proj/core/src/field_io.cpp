#include "choquard/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "choquard/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "CHQF writer assumes a little-endian host");

namespace choquard {

namespace {
constexpr char kMagic[4] = {'C', 'H', 'Q', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("CHQF: truncated file");
  return v;
}
}  // namespace

void dump_field(const Field& f, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("CHQF: cannot open " + file.string() + " for writing");
  os.write(kMagic, 4);
  write_raw(os, kVersion);
  write_raw(os, static_cast<std::uint32_t>(f.grid().dim));
  write_raw(os, static_cast<std::uint32_t>(f.grid().n));
  write_raw(os, f.grid().box_length);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!os) throw Error("CHQF: write failed for " + file.string());
}

Field load_field(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("CHQF: cannot open " + file.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("CHQF: bad magic in " + file.string());
  const auto version = read_raw<std::uint32_t>(is);
  if (version != kVersion) throw Error("CHQF: unsupported version");
  const auto dim = read_raw<std::uint32_t>(is);
  const auto n = read_raw<std::uint32_t>(is);
  const auto L = read_raw<double>(is);
  Grid g = make_grid(static_cast<int>(dim), static_cast<int>(n), L);
  Field f(g);
  is.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!is) throw Error("CHQF: truncated values in " + file.string());
  return f;
}

std::uint64_t file_checksum(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("checksum: cannot open " + file.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof(buf));
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  return hash;
}

}  // namespace choquard
