#include "trpca/tensor_io.hpp"

#include "trpca/errors.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace trpca {

namespace {

constexpr std::array<char, 4> kMagic{'T', 'N', 'S', '3'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw ParseError("TNS3: truncated header");
  }
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[b];
  return v;
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor3& t) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, static_cast<std::uint64_t>(t.n1()));
  put_u64(out, static_cast<std::uint64_t>(t.n2()));
  put_u64(out, static_cast<std::uint64_t>(t.n3()));
  for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw std::runtime_error("TNS3: write failed");
}

void write_tensor(const std::filesystem::path& path, const Tensor3& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_tensor(out, t);
}

Tensor3 read_tensor(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("TNS3: bad magic bytes");
  }
  std::array<std::uint64_t, 3> ext{};
  for (auto& e : ext) e = get_u64(in);
  constexpr auto kMaxExtent = static_cast<std::uint64_t>(std::numeric_limits<Index>::max());
  for (auto e : ext) {
    if (e == 0 || e > kMaxExtent) throw ParseError("TNS3: invalid extent " + std::to_string(e));
  }
  TensorDims dims;
  try {
    dims = TensorDims(static_cast<Index>(ext[0]), static_cast<Index>(ext[1]), static_cast<Index>(ext[2]));
  } catch (const ShapeError& e) {
    throw ParseError(std::string("TNS3: ") + e.what());
  }
  const auto payload = static_cast<std::uint64_t>(dims.numel()) * 8u;
  if (const auto here = in.tellg(); here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto remaining = static_cast<std::uint64_t>(in.tellg() - here);
    in.seekg(here);
    if (remaining != payload) {
      throw ParseError("TNS3: header declares " + std::to_string(payload) + " payload bytes, file has " +
                       std::to_string(remaining));
    }
  }
  std::vector<double> values(static_cast<std::size_t>(dims.numel()));
  std::vector<unsigned char> raw(values.size() * 8);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw ParseError("TNS3: payload shorter than n1*n2*n3 entries");
  }
  for (std::size_t n = 0; n < values.size(); ++n) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | raw[8 * n + static_cast<std::size_t>(b)];
    values[n] = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("TNS3: trailing bytes after payload");
  try {
    return Tensor3::from_data(dims, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("TNS3: ") + e.what());
  }
}

Tensor3 read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_tensor(in);
}

}  // namespace trpca
