#ifndef GLANDTOPO_RENDER_HPP
#define GLANDTOPO_RENDER_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "glandtopo/io.hpp"
#include "glandtopo/morphology.hpp"
#include "glandtopo/raster.hpp"

namespace glandtopo {

inline constexpr std::size_t kPaletteSize = 64;

/// Fixed 64-colour palette: golden-angle hues over four saturation/value tiers.
inline const std::array<Rgb, kPaletteSize>& palette() {
  static const std::array<Rgb, kPaletteSize> colours = [] {
    std::array<Rgb, kPaletteSize> out{};
    for (std::size_t i = 0; i < kPaletteSize; ++i) {
      const double hue = std::fmod(static_cast<double>(i) * 0.618033988749895, 1.0) * 6.0;
      const double sat = 0.95 - 0.15 * static_cast<double>(i % 4);
      const double val = 1.0 - 0.12 * static_cast<double>((i / 4) % 3);
      const double chroma = val * sat;
      const double x = chroma * (1.0 - std::fabs(std::fmod(hue, 2.0) - 1.0));
      const double m = val - chroma;
      double r = 0, g = 0, b = 0;
      switch (static_cast<int>(hue)) {
        case 0: r = chroma; g = x; break;
        case 1: r = x; g = chroma; break;
        case 2: g = chroma; b = x; break;
        case 3: g = x; b = chroma; break;
        case 4: r = x; b = chroma; break;
        default: r = chroma; b = x; break;
      }
      auto to8 = [](double v) { return static_cast<std::uint8_t>(std::lround(v * 255.0)); };
      out[i] = {to8(r + m), to8(g + m), to8(b + m)};
    }
    return out;
  }();
  return colours;
}

inline Rgb label_colour(Label label) { return palette()[(label - 1) % kPaletteSize]; }

/// Blends each gland 50/50 with its palette colour and paints its boundary solid.
/// Background pixels are copied unchanged.
inline RgbImage render_overlay(const RgbImage& image, const LabelMap& labels) {
  require_same_shape(image, labels, "render");
  RgbImage out = image;
  for (std::size_t r = 0; r < labels.height(); ++r) {
    for (std::size_t c = 0; c < labels.width(); ++c) {
      const Label v = labels(r, c);
      if (v == 0) continue;
      const Rgb col = label_colour(v);
      bool edge = false;
      for (const Offset& o : kNeighbors4) {
        if (labels.pixels.get_or(static_cast<std::ptrdiff_t>(r) + o.drow, static_cast<std::ptrdiff_t>(c) + o.dcol,
                                 0) != v) {
          edge = true;
          break;
        }
      }
      Rgb& px = out(r, c);
      for (std::size_t k = 0; k < 3; ++k) {
        px[k] = edge ? col[k] : static_cast<std::uint8_t>((unsigned{px[k]} + unsigned{col[k]} + 1) / 2);
      }
    }
  }
  return out;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_RENDER_HPP
