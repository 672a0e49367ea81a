#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "tgat/error.hpp"

// Little-endian float64 / uint64 helpers shared by the on-disk formats.
namespace tgat::binary {

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
  const std::uint64_t le = to_le(v);
  os.write(reinterpret_cast<const char*>(&le), sizeof le);
}

inline std::uint64_t read_u64(std::istream& is) {
  std::uint64_t le = 0;
  if (!is.read(reinterpret_cast<char*>(&le), sizeof le)) throw DataError("unexpected end of binary data");
  return to_le(le);
}

inline void write_f64(std::ostream& os, std::span<const double> xs) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(xs.data()), static_cast<std::streamsize>(xs.size() * sizeof(double)));
  } else {
    for (double x : xs) write_u64(os, std::bit_cast<std::uint64_t>(x));
  }
}

inline void read_f64(std::istream& is, std::span<double> xs) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!is.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(xs.size() * sizeof(double))))
      throw DataError("unexpected end of binary data");
  } else {
    for (double& x : xs) x = std::bit_cast<double>(read_u64(is));
  }
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
  return os;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw IoError("cannot open '" + p.string() + "' for reading");
  return is;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream is = open_in(p);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os = open_out(p);
  os << text;
  if (!os) throw IoError("failed writing '" + p.string() + "'");
}

}  // namespace tgat::binary
