#include "trpca/netpbm.hpp"

#include "trpca/errors.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace trpca {

namespace {

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    } else if (c != std::char_traits<char>::eof() && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const char* field) {
  skip_space_and_comments(in);
  long value = 0;
  int digits = 0;
  while (std::isdigit(in.peek())) {
    value = value * 10 + (in.get() - '0');
    if (++digits > 9) throw ParseError(std::string("netpbm: ") + field + " too large");
  }
  if (digits == 0) throw ParseError(std::string("netpbm: missing ") + field);
  return static_cast<int>(value);
}

}  // namespace

NetpbmImage read_netpbm(std::istream& in) {
  char magic[2] = {0, 0};
  if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
    throw ParseError("netpbm: expected P5 or P6 magic");
  }
  NetpbmImage img;
  img.channels = magic[1] == '5' ? 1 : 3;
  img.width = read_header_int(in, "width");
  img.height = read_header_int(in, "height");
  const int maxval = read_header_int(in, "maxval");
  if (img.width < 1 || img.height < 1) throw ParseError("netpbm: zero image extent");
  if (maxval != 255) throw ParseError("netpbm: maxval must be 255, got " + std::to_string(maxval));
  if (!std::isspace(in.get())) throw ParseError("netpbm: missing whitespace after maxval");

  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  if (!in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()))) {
    throw ParseError("netpbm: truncated raster");
  }
  return img;
}

NetpbmImage read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_netpbm(in);
}

void write_netpbm(std::ostream& out, const NetpbmImage& img) {
  if (img.channels != 1 && img.channels != 3) throw std::invalid_argument("netpbm: channels must be 1 or 3");
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw std::invalid_argument("netpbm: pixel buffer does not match extents");
  }
  out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("netpbm: write failed");
}

void write_netpbm(const std::filesystem::path& path, const NetpbmImage& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_netpbm(out, img);
}

}  // namespace trpca
