#include "ccsim/symbol_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ccsim::io {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; byte swapping is not implemented");

namespace {

constexpr char kSymbolMagic[6] = {'C', 'C', 'S', 'Y', 'M', 'B'};
constexpr char kFieldMagic[6] = {'C', 'C', 'F', 'L', 'D', 'F'};
constexpr std::uint16_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw IoError("unexpected end of file");
  return v;
}

void write_quads(std::ostream& os, const Eigen::ArrayXcd& x, const Eigen::ArrayXcd& y) {
  for (long i = 0; i < x.size(); ++i) {
    put(os, x[i].real());
    put(os, x[i].imag());
    put(os, y[i].real());
    put(os, y[i].imag());
  }
}

void read_quads(std::istream& is, Eigen::ArrayXcd& x, Eigen::ArrayXcd& y, long count) {
  x.resize(count);
  y.resize(count);
  for (long i = 0; i < count; ++i) {
    const double rx = get<double>(is);
    const double ix = get<double>(is);
    const double ry = get<double>(is);
    const double iy = get<double>(is);
    x[i] = {rx, ix};
    y[i] = {ry, iy};
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path, const char (&magic)[6], const char* what) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  char seen[6];
  is.read(seen, 6);
  if (!is || std::memcmp(seen, magic, 6) != 0)
    throw IoError("'" + path + "' is not a " + what + " file");
  const auto version = get<std::uint16_t>(is);
  if (version != kVersion)
    throw IoError("'" + path + "': unsupported version " + std::to_string(version));
  return is;
}

}  // namespace

void write_symbol_file(const std::string& path, const mapping::QamFrame& frame) {
  if (frame.symbols_x.size() != frame.symbols_y.size())
    throw IoError("write_symbol_file: polarization streams differ in length");
  auto os = open_out(path);
  os.write(kSymbolMagic, 6);
  put(os, kVersion);
  put(os, static_cast<std::uint64_t>(frame.size()));
  put(os, static_cast<std::uint32_t>(frame.block_length_n));
  put(os, static_cast<std::uint8_t>(frame.pairing == mapping::Pairing::intra ? 0 : 1));
  put(os, static_cast<std::uint8_t>(frame.interleaved ? 1 : 0));
  put(os, static_cast<std::uint32_t>(frame.fec_block_len));
  put(os, static_cast<std::uint64_t>(frame.seed));
  write_quads(os, frame.symbols_x, frame.symbols_y);
  if (!os) throw IoError("write_symbol_file: write to '" + path + "' failed");
}

mapping::QamFrame read_symbol_file(const std::string& path) {
  auto is = open_in(path, kSymbolMagic, "ccsim symbol");
  mapping::QamFrame frame;
  const auto count = get<std::uint64_t>(is);
  frame.block_length_n = static_cast<int>(get<std::uint32_t>(is));
  frame.pairing = get<std::uint8_t>(is) == 0 ? mapping::Pairing::intra : mapping::Pairing::inter;
  frame.interleaved = get<std::uint8_t>(is) != 0;
  frame.fec_block_len = static_cast<int>(get<std::uint32_t>(is));
  frame.seed = get<std::uint64_t>(is);
  read_quads(is, frame.symbols_x, frame.symbols_y, static_cast<long>(count));
  return frame;
}

void write_field_file(const std::string& path, const channel::OpticalField& field) {
  auto os = open_out(path);
  os.write(kFieldMagic, 6);
  put(os, kVersion);
  put(os, static_cast<std::uint64_t>(field.size()));
  put(os, field.sample_rate_hz);
  put(os, field.center_offset_hz);
  write_quads(os, field.x, field.y);
  if (!os) throw IoError("write_field_file: write to '" + path + "' failed");
}

channel::OpticalField read_field_file(const std::string& path) {
  auto is = open_in(path, kFieldMagic, "ccsim field");
  channel::OpticalField field;
  const auto count = get<std::uint64_t>(is);
  field.sample_rate_hz = get<double>(is);
  field.center_offset_hz = get<double>(is);
  read_quads(is, field.x, field.y, static_cast<long>(count));
  return field;
}

}  // namespace ccsim::io
