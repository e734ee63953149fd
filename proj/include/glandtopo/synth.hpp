#ifndef GLANDTOPO_SYNTH_HPP
#define GLANDTOPO_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "glandtopo/morphology.hpp"
#include "glandtopo/raster.hpp"
#include "glandtopo/rng.hpp"

namespace glandtopo {

enum class ShapeFamily { Disk, Ellipse, Blob, FusedPair, Ring };

inline std::string_view to_string(ShapeFamily f) {
  switch (f) {
    case ShapeFamily::Disk: return "disk";
    case ShapeFamily::Ellipse: return "ellipse";
    case ShapeFamily::Blob: return "blob";
    case ShapeFamily::FusedPair: return "fused-pair";
    case ShapeFamily::Ring: return "ring";
  }
  return "?";
}

inline ShapeFamily parse_family(std::string_view s) {
  for (auto f : {ShapeFamily::Disk, ShapeFamily::Ellipse, ShapeFamily::Blob, ShapeFamily::FusedPair,
                 ShapeFamily::Ring}) {
    if (s == to_string(f)) return f;
  }
  throw InvalidArgument("unknown shape family '" + std::string(s) + "'");
}

/// Parameters of a synthetic gland corpus.
///
/// Image i draws its shape family from family_cycle[i % family_cycle.size()].
/// A fused-pair image holds exactly one pair of touching glands (2 labels); every
/// other image holds between min_glands and max_glands disjoint glands of its family.
struct SynthCorpusSpec {
  std::size_t count = 10;
  std::size_t width = 256;
  std::size_t height = 256;
  std::size_t min_glands = 3;
  std::size_t max_glands = 6;
  double min_radius = 14.0;
  double max_radius = 26.0;
  std::vector<ShapeFamily> family_cycle{ShapeFamily::Disk, ShapeFamily::Ellipse, ShapeFamily::Blob};
  std::uint64_t seed = 0;

  void validate() const {
    if (count == 0 || width < 32 || height < 32) throw InvalidArgument("synth: need count > 0 and images >= 32x32");
    if (min_glands == 0 || min_glands > max_glands) throw InvalidArgument("synth: bad gland count range");
    if (!(min_radius >= 4.0 && min_radius <= max_radius)) throw InvalidArgument("synth: bad radius range");
    if (family_cycle.empty()) throw InvalidArgument("synth: no shape family given");
  }
};

struct SynthSample {
  ShapeFamily family = ShapeFamily::Disk;
  Raster<std::uint8_t> image;
  LabelMap labels;
};

namespace detail {

struct Point {
  double r, c;
};

/// Point-in-polygon by crossing number; vertices in order.
inline bool inside_polygon(const std::vector<Point>& poly, double r, double c) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.r > r) != (b.r > r) && c < (b.c - a.c) * (r - a.r) / (b.r - a.r) + a.c) in = !in;
  }
  return in;
}

/// Keeps the largest 8-connected component of `m`.
inline Mask largest_component(const Mask& m) {
  const LabelMap cc = connected_components(m, Connectivity::Eight);
  if (cc.n_labels <= 1) return m;
  const auto areas = label_areas(cc);
  const auto best = static_cast<Label>(std::max_element(areas.begin() + 1, areas.end()) - areas.begin());
  return label_mask(cc, best);
}

/// Rasterizes one single-gland shape of `family` centred at (cr, cc).
inline Mask draw_shape(ShapeFamily family, std::size_t w, std::size_t h, double cr, double cc, double radius,
                       Rng& rng) {
  Mask m(w, h);
  auto paint = [&](auto&& inside) {
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c)
        if (inside(static_cast<double>(r) - cr, static_cast<double>(c) - cc)) m(r, c) = 1;
  };
  switch (family) {
    case ShapeFamily::Disk:
      paint([&](double dr, double dc) { return dr * dr + dc * dc <= radius * radius; });
      break;
    case ShapeFamily::Ellipse: {
      const double a = radius, b = radius * rng.uniform(0.5, 0.8), theta = rng.uniform(0.0, std::numbers::pi);
      const double ct = std::cos(theta), st = std::sin(theta);
      paint([&](double dr, double dc) {
        const double u = dc * ct + dr * st, v = -dc * st + dr * ct;
        return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
      });
      break;
    }
    case ShapeFamily::Ring: {
      const double inner = radius * rng.uniform(0.35, 0.5);
      paint([&](double dr, double dc) {
        const double d2 = dr * dr + dc * dc;
        return d2 <= radius * radius && d2 > inner * inner;
      });
      break;
    }
    case ShapeFamily::Blob: {
      // Star-shaped random polygon, smoothed by a closing then an opening.
      const auto n = static_cast<std::size_t>(rng.uniform_int(7, 12));
      std::vector<Point> poly;
      for (std::size_t i = 0; i < n; ++i) {
        const double ang = 2.0 * std::numbers::pi * (static_cast<double>(i) + rng.uniform(-0.3, 0.3)) /
                           static_cast<double>(n);
        const double rad = radius * rng.uniform(0.75, 1.15);
        poly.push_back({cr + rad * std::sin(ang), cc + rad * std::cos(ang)});
      }
      paint([&](double dr, double dc) { return inside_polygon(poly, cr + dr, cc + dc); });
      m = erode(dilate(m));
      m = dilate(erode(m));
      m = fill_holes(largest_component(m));
      break;
    }
    case ShapeFamily::FusedPair:
      throw InvalidArgument("fused pairs are drawn by draw_fused_pair");
  }
  return m;
}

/// Two overlapping disks split along the power-diagram boundary: each pixel of the
/// union goes to the disk minimising (distance to centre - radius).
inline LabelImage draw_fused_pair(std::size_t w, std::size_t h, double radius_lo, double radius_hi, Rng& rng) {
  const double r1 = rng.uniform(radius_lo, radius_hi), r2 = rng.uniform(radius_lo, radius_hi);
  const double sep = (r1 + r2) * rng.uniform(0.65, 0.8);
  const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double mr = static_cast<double>(h) / 2.0, mc = static_cast<double>(w) / 2.0;
  const double c1r = mr - 0.5 * sep * std::sin(ang), c1c = mc - 0.5 * sep * std::cos(ang);
  const double c2r = mr + 0.5 * sep * std::sin(ang), c2c = mc + 0.5 * sep * std::cos(ang);
  LabelImage out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double d1 = std::hypot(static_cast<double>(r) - c1r, static_cast<double>(c) - c1c);
      const double d2 = std::hypot(static_cast<double>(r) - c2r, static_cast<double>(c) - c2c);
      if (d1 > r1 && d2 > r2) continue;
      out(r, c) = (d1 - r1 <= d2 - r2) ? 1 : 2;
    }
  }
  return out;
}

/// Grayscale H&E stand-in: bright stroma, darker glands with a darker rim and pale lumen.
inline Raster<std::uint8_t> render_texture(const LabelMap& labels, Rng& rng) {
  const Mask fg = foreground(labels);
  const Mask rim = erode(fg);
  Raster<std::uint8_t> img(labels.width(), labels.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    double base = 215.0;
    if (fg[i]) base = rim[i] ? 125.0 : 80.0;
    const double noise = (rng.uniform() + rng.uniform() + rng.uniform() - 1.5) * 24.0;
    img[i] = static_cast<std::uint8_t>(std::clamp(base + noise, 0.0, 255.0));
  }
  return img;
}

}  // namespace detail

/// Generates image `index` of the corpus. Depends only on (spec, index), so images
/// can be produced in any order or in parallel.
inline SynthSample synth_sample(const SynthCorpusSpec& spec, std::size_t index) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, index));
  SynthSample out;
  out.family = spec.family_cycle[index % spec.family_cycle.size()];
  const std::size_t w = spec.width, h = spec.height;

  if (out.family == ShapeFamily::FusedPair) {
    out.labels = canonicalize(detail::draw_fused_pair(w, h, spec.min_radius, spec.max_radius, rng));
    out.image = detail::render_texture(out.labels, rng);
    return out;
  }

  const auto target = static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(spec.min_glands), static_cast<std::int64_t>(spec.max_glands)));
  // Keep glands at least 3 pixels apart and 2 pixels from the border.
  constexpr int kGap = 3;
  LabelImage labels(w, h);
  Mask blocked(w, h);
  std::size_t placed = 0;
  double shrink = 1.0;
  for (int attempt = 0; placed < target; ++attempt) {
    if (attempt > 0 && attempt % 200 == 0) shrink *= 0.85;
    if (shrink * spec.max_radius < 4.0) throw InvalidArgument("synth: cannot fit the requested glands");
    const double radius = shrink * rng.uniform(spec.min_radius, spec.max_radius);
    const double margin = radius + 2.0;
    if (2.0 * margin >= static_cast<double>(std::min(w, h))) continue;
    const double cr = rng.uniform(margin, static_cast<double>(h) - margin);
    const double cc = rng.uniform(margin, static_cast<double>(w) - margin);
    const Mask shape = detail::draw_shape(out.family, w, h, cr, cc, radius, rng);
    bool fits = count_on(shape) > 0;
    for (std::size_t i = 0; fits && i < shape.size(); ++i) fits = !(shape[i] && blocked[i]);
    for (std::size_t r = 0; fits && r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        if (shape(r, c) && (r < 2 || c < 2 || r + 2 >= h || c + 2 >= w)) {
          fits = false;
          break;
        }
      }
    }
    if (!fits) continue;
    ++placed;
    Mask grown = shape;
    for (int k = 0; k < kGap; ++k) grown = dilate(grown);
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (shape[i]) labels[i] = static_cast<Label>(placed);
      if (grown[i]) blocked[i] = 1;
    }
  }
  out.labels = canonicalize(labels);
  out.image = detail::render_texture(out.labels, rng);
  return out;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_SYNTH_HPP
