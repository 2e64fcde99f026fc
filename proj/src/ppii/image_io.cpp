#include "ppii/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ppii/error.hpp"

namespace ppii {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  return f;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

LoadedImage load_png(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    fail(ErrorCode::InvalidInput, path.string() + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::Internal, "libpng initialisation failed");
  }
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  // libpng reports decode errors by longjmp; everything after this point
  // that needs destruction lives outside the jump scope.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::InvalidInput, path.string() + ": corrupt PNG data");
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const auto color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::InvalidInput, path.string() + ": not a single-channel grayscale PNG");
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_swap(png);  // native little-endian uint16 rows
  png_read_update_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const int out_depth = depth == 16 ? 16 : 8;
  std::vector<double> data(static_cast<std::size_t>(w) * h);
  if (out_depth == 16) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      data[i] = v / 65535.0;
    }
  } else {
    // Sub-byte depths are expanded to 0..(2^d - 1), not rescaled.
    const double top = depth < 8 ? static_cast<double>((1 << depth) - 1) : 255.0;
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = buffer[i] / top;
  }
  return {Raster(w, h, std::move(data)), out_depth};
}

void skip_pgm_space(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

LoadedImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') fail(ErrorCode::InvalidInput, path.string() + ": not a binary PGM (P5)");
  std::size_t w = 0, h = 0, maxval = 0;
  skip_pgm_space(in);
  in >> w;
  skip_pgm_space(in);
  in >> h;
  skip_pgm_space(in);
  in >> maxval;
  if (!in || w == 0 || h == 0 || maxval == 0 || maxval > 65535) {
    fail(ErrorCode::InvalidInput, path.string() + ": malformed PGM header");
  }
  in.get();  // single whitespace before the raster
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(w * h * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) fail(ErrorCode::InvalidInput, path.string() + ": truncated PGM");
  std::vector<double> data(w * h);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned v = bytes_per == 2 ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
    data[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return {Raster(w, h, std::move(data)), bytes_per == 2 ? 16 : 8};
}

void save_png(const Raster& img, const std::filesystem::path& path, int bit_depth) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::Internal, "libpng initialisation failed");
  }
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t bpp = bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> buffer(w * h * bpp);
  for (std::size_t i = 0; i < w * h; ++i) {
    const std::uint16_t q = quantize(img.values()[i], bit_depth);
    if (bpp == 2) {
      buffer[2 * i] = static_cast<png_byte>(q >> 8);  // PNG stores big-endian
      buffer[2 * i + 1] = static_cast<png_byte>(q & 0xff);
    } else {
      buffer[i] = static_cast<png_byte>(q);
    }
  }
  std::vector<png_bytep> rows(h);
  for (std::size_t y = 0; y < h; ++y) rows[y] = buffer.data() + y * w * bpp;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::Io, "failed writing " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_pgm(const Raster& img, const std::filesystem::path& path, int bit_depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string());
  const unsigned maxval = bit_depth == 16 ? 65535u : 255u;
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(img.size() * (bit_depth == 16 ? 2 : 1));
  for (double v : img.values()) {
    const std::uint16_t q = quantize(v, bit_depth);
    if (bit_depth == 16) raw.push_back(static_cast<unsigned char>(q >> 8));
    raw.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace

std::uint16_t quantize(double v, int bit_depth) {
  const double top = bit_depth == 16 ? 65535.0 : 255.0;
  if (std::isnan(v)) v = 0.0;
  // nearbyint honours the default FE_TONEAREST mode: ties go to even.
  return static_cast<std::uint16_t>(std::nearbyint(std::clamp(v, 0.0, 1.0) * top));
}

LoadedImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorCode::Io, "no such file: " + path.string());
  if (lower_extension(path) == ".pgm") return load_pgm(path);
  return load_png(path);
}

void save_image(const Raster& img, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) fail(ErrorCode::InvalidInput, "bit depth must be 8 or 16");
  if (img.empty()) fail(ErrorCode::InvalidInput, "cannot save an empty raster");
  if (lower_extension(path) == ".pgm") {
    save_pgm(img, path, bit_depth);
  } else {
    save_png(img, path, bit_depth);
  }
}

}  // namespace ppii
