#ifndef GLANDTOPO_IO_HPP
#define GLANDTOPO_IO_HPP

#include <png.h>

#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "glandtopo/raster.hpp"

namespace glandtopo {

using Rgb = std::array<std::uint8_t, 3>;
using RgbImage = Raster<Rgb>;

/// Decoded PNG samples, one 16-bit slot per channel value regardless of bit depth.
struct PngData {
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 0;   ///< 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
  int bit_depth = 0;  ///< 8 or 16 after expansion
  std::vector<std::uint16_t> samples;

  std::uint16_t sample(std::size_t row, std::size_t col, int ch) const {
    return samples[(row * width + col) * static_cast<std::size_t>(channels) + static_cast<std::size_t>(ch)];
  }
};

namespace detail {

/// Writes through `fill(tmp_path)` then renames over `path`, so readers never see
/// a partially written file.
template <typename Fill>
void write_atomically(const std::filesystem::path& path, Fill&& fill) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    fill(tmp);
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

inline void png_error_fn(png_structp png, png_const_charp) { std::longjmp(png_jmpbuf(png), 1); }
inline void png_warning_fn(png_structp, png_const_charp) {}

inline void write_png_rows(const std::filesystem::path& path, std::size_t width, std::size_t height,
                           int color_type, int bit_depth, const std::vector<png_bytep>& rows) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  if (bit_depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed to flush '" + path.string() + "'");
}

}  // namespace detail

/// Reads any 8/16-bit PNG; palette and low-bit gray images are expanded to 8 bits.
inline PngData read_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, detail::FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open '" + path.string() + "'");
  std::array<unsigned char, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() || png_sig_cmp(sig.data(), 0, 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a PNG file");
  }
  PngData out;
  std::vector<png_bytep> rows;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_error_fn, detail::png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  std::vector<std::uint8_t> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("malformed PNG '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  png_read_update_info(png, info);
  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * out.height);
  rows.resize(out.height);
  for (std::size_t r = 0; r < out.height; ++r) rows[r] = buffer.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = out.width * out.height * static_cast<std::size_t>(out.channels);
  out.samples.resize(n);
  if (out.bit_depth == 16) {
    std::memcpy(out.samples.data(), buffer.data(), n * 2);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = buffer[i];
  }
  return out;
}

/// Label map from a single-channel 8- or 16-bit PNG (pixel value = label), canonicalized.
inline LabelMap read_label_png(const std::filesystem::path& path) {
  const PngData png = read_png(path);
  if (png.channels != 1) throw FormatError("'" + path.string() + "' is not a grayscale label map");
  LabelImage img(png.width, png.height);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = png.samples[i];
  return canonicalize(img);
}

/// Grayscale 8-bit image (colour inputs are converted by channel mean).
inline Raster<std::uint8_t> read_gray_png(const std::filesystem::path& path) {
  const PngData png = read_png(path);
  Raster<std::uint8_t> img(png.width, png.height);
  const int colour = png.channels >= 3 ? 3 : 1;
  for (std::size_t r = 0; r < png.height; ++r) {
    for (std::size_t c = 0; c < png.width; ++c) {
      unsigned sum = 0;
      for (int ch = 0; ch < colour; ++ch) sum += png.sample(r, c, ch);
      unsigned v = sum / static_cast<unsigned>(colour);
      if (png.bit_depth == 16) v >>= 8;
      img(r, c) = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

/// RGB image; grayscale inputs are replicated into all three channels.
inline RgbImage read_rgb_png(const std::filesystem::path& path) {
  const PngData png = read_png(path);
  RgbImage img(png.width, png.height);
  for (std::size_t r = 0; r < png.height; ++r) {
    for (std::size_t c = 0; c < png.width; ++c) {
      Rgb px{};
      for (int ch = 0; ch < 3; ++ch) {
        unsigned v = png.sample(r, c, png.channels >= 3 ? ch : 0);
        if (png.bit_depth == 16) v >>= 8;
        px[static_cast<std::size_t>(ch)] = static_cast<std::uint8_t>(v);
      }
      img(r, c) = px;
    }
  }
  return img;
}

inline void write_gray_png(const std::filesystem::path& path, const Raster<std::uint8_t>& image) {
  std::vector<png_bytep> rows(image.height());
  auto& mut = const_cast<Raster<std::uint8_t>&>(image);
  for (std::size_t r = 0; r < image.height(); ++r) rows[r] = &mut(r, 0);
  detail::write_atomically(path, [&](const auto& tmp) {
    detail::write_png_rows(tmp, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 8, rows);
  });
}

/// Binary mask as 8-bit PNG with values 0 / 255.
inline void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  Raster<std::uint8_t> img(mask.width(), mask.height());
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = mask[i] ? 255 : 0;
  write_gray_png(path, img);
}

/// Label map as 16-bit grayscale PNG.
inline void write_label_png(const std::filesystem::path& path, const LabelMap& labels) {
  if (labels.n_labels > 0xFFFF) throw InvalidArgument("label map has more than 65535 labels");
  std::vector<std::uint16_t> buf(labels.pixels.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<std::uint16_t>(labels[i]);
  std::vector<png_bytep> rows(labels.height());
  for (std::size_t r = 0; r < labels.height(); ++r) {
    rows[r] = reinterpret_cast<png_bytep>(buf.data() + r * labels.width());
  }
  detail::write_atomically(path, [&](const auto& tmp) {
    detail::write_png_rows(tmp, labels.width(), labels.height(), PNG_COLOR_TYPE_GRAY, 16, rows);
  });
}

inline void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  std::vector<png_bytep> rows(image.height());
  auto& mut = const_cast<RgbImage&>(image);
  for (std::size_t r = 0; r < image.height(); ++r) rows[r] = mut(r, 0).data();
  detail::write_atomically(path, [&](const auto& tmp) {
    detail::write_png_rows(tmp, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, rows);
  });
}

// F32R: "F32R", u32 LE width, u32 LE height, then row-major f32 LE samples.

inline std::vector<std::uint8_t> encode_f32r(const RealRaster& raster) {
  std::vector<std::uint8_t> bytes(12 + raster.size() * 4);
  std::size_t at = 0;
  auto put32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes[at++] = static_cast<std::uint8_t>(v >> (8 * i));
  };
  for (char ch : {'F', '3', '2', 'R'}) bytes[at++] = static_cast<std::uint8_t>(ch);
  put32(static_cast<std::uint32_t>(raster.width()));
  put32(static_cast<std::uint32_t>(raster.height()));
  for (double v : raster) put32(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return bytes;
}

inline RealRaster decode_f32r(const std::vector<std::uint8_t>& bytes, const std::string& what = "F32R data") {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "F32R", 4) != 0) {
    throw FormatError(what + ": missing F32R header");
  }
  auto get32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + static_cast<std::size_t>(i)]) << (8 * i);
    return v;
  };
  const std::size_t w = get32(4), h = get32(8);
  if (w == 0 || h == 0 || bytes.size() != 12 + w * h * 4) {
    throw FormatError(what + ": size does not match a " + std::to_string(w) + "x" + std::to_string(h) + " raster");
  }
  RealRaster out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const float v = std::bit_cast<float>(get32(12 + 4 * i));
    if (!std::isfinite(v)) throw FormatError(what + ": non-finite sample at index " + std::to_string(i));
    out[i] = v;
  }
  return out;
}

inline void write_f32r(const std::filesystem::path& path, const RealRaster& raster) {
  const auto bytes = encode_f32r(raster);
  detail::write_atomically(path, [&](const auto& tmp) {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("failed to write '" + tmp.string() + "'");
  });
}

inline RealRaster read_f32r(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_f32r(bytes, path.string());
}

/// Writes a text file atomically.
inline void write_text(const std::filesystem::path& path, const std::string& text) {
  detail::write_atomically(path, [&](const auto& tmp) {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os << text;
    if (!os) throw IoError("failed to write '" + tmp.string() + "'");
  });
}

}  // namespace glandtopo

#endif  // GLANDTOPO_IO_HPP
