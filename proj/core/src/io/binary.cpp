#include "binary.hpp"

#include <array>

namespace storseismic::io {
namespace {

template <std::size_t N>
void put(std::ostream& out, std::uint64_t v) {
  std::array<char, N> buf{};
  for (std::size_t i = 0; i < N; ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  }
  out.write(buf.data(), N);
}

template <std::size_t N>
std::uint64_t get(std::istream& in) {
  std::array<unsigned char, N> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), N);
  if (!in) {
    throw DataError("unexpected end of file");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < N; ++i) {
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void write_u8(std::ostream& out, std::uint8_t v) { put<1>(out, v); }
void write_u16(std::ostream& out, std::uint16_t v) { put<2>(out, v); }
void write_u32(std::ostream& out, std::uint32_t v) { put<4>(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { put<8>(out, v); }
void write_f32(std::ostream& out, float v) {
  put<4>(out, std::bit_cast<std::uint32_t>(v));
}
void write_f64(std::ostream& out, double v) {
  put<8>(out, std::bit_cast<std::uint64_t>(v));
}
void write_bytes(std::ostream& out, const std::string& bytes) {
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::uint8_t read_u8(std::istream& in) {
  return static_cast<std::uint8_t>(get<1>(in));
}
std::uint16_t read_u16(std::istream& in) {
  return static_cast<std::uint16_t>(get<2>(in));
}
std::uint32_t read_u32(std::istream& in) {
  return static_cast<std::uint32_t>(get<4>(in));
}
std::uint64_t read_u64(std::istream& in) { return get<8>(in); }
float read_f32(std::istream& in) {
  return std::bit_cast<float>(static_cast<std::uint32_t>(get<4>(in)));
}
double read_f64(std::istream& in) { return std::bit_cast<double>(get<8>(in)); }

std::string read_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) {
    throw DataError("unexpected end of file");
  }
  return s;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) {
    throw DataError(std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace storseismic::io
