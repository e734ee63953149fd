#ifndef GLANDTOPO_DISTANCE_HPP
#define GLANDTOPO_DISTANCE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "glandtopo/morphology.hpp"
#include "glandtopo/raster.hpp"

namespace glandtopo {

/// d(p) = iteration of repeated one-pixel erosion that removes p; 0 on background.
using DepthMap = Raster<std::uint32_t>;

/// Erosion depth of every gland, each gland eroded in isolation (other labels and
/// the area outside the raster count as background).
///
/// Iterating a 3x3 square (cross) erosion k times is erosion by a (2k+1) square
/// (diamond), so the depth is the chessboard (city-block) distance to the nearest
/// pixel not carrying the same label. Computed with a two-pass chamfer sweep.
inline DepthMap erosion_depth(const LabelMap& labels,
                              StructuringElement se = StructuringElement::Square3x3) {
  const std::size_t h = labels.height(), w = labels.width();
  const auto H = static_cast<std::ptrdiff_t>(h), W = static_cast<std::ptrdiff_t>(w);
  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max() / 2;
  DepthMap depth(w, h);
  const auto fp = footprint(se);

  for (std::ptrdiff_t r = 0; r < H; ++r) {
    for (std::ptrdiff_t c = 0; c < W; ++c) {
      const Label v = labels.pixels(r, c);
      if (v == 0) continue;
      std::uint32_t d = kInf;
      for (const Offset& o : fp) {
        if (labels.pixels.get_or(r + o.drow, c + o.dcol, 0) != v) {
          d = 1;
          break;
        }
      }
      depth(r, c) = d;
    }
  }

  // A neighbour is causal in the forward sweep when it precedes the pixel in raster order.
  auto sweep = [&](bool forward) {
    const std::ptrdiff_t r0 = forward ? 0 : H - 1, r1 = forward ? H : -1, step = forward ? 1 : -1;
    for (std::ptrdiff_t r = r0; r != r1; r += step) {
      for (std::ptrdiff_t c = forward ? 0 : W - 1; c != (forward ? W : -1); c += step) {
        const Label v = labels.pixels(r, c);
        if (v == 0) continue;
        std::uint32_t d = depth(r, c);
        if (d == 1) continue;
        for (const Offset& o : fp) {
          const bool causal = o.drow * step < 0 || (o.drow == 0 && o.dcol * step < 0);
          if (!causal) continue;
          // Same-label neighbours are in bounds: anything else would have set d = 1.
          d = std::min(d, depth(r + o.drow, c + o.dcol) + 1);
        }
        depth(r, c) = d;
      }
    }
  };
  sweep(true);
  sweep(false);
  return depth;
}

namespace detail {

/// Lower envelope of parabolas (exact 1D squared distance transform).
inline void edt_1d(const double* f, std::size_t n, double* out, std::vector<std::size_t>& v,
                   std::vector<double>& z) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] < kInf) {
      first = q;
      break;
    }
  }
  if (first == n) {
    for (std::size_t q = 0; q < n; ++q) out[q] = kInf;
    return;
  }
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (std::size_t q = first + 1; q < n; ++q) {
    if (!(f[q] < kInf)) continue;
    const double dq = static_cast<double>(q);
    double s;
    while (true) {
      const double dv = static_cast<double>(v[k]);
      s = ((f[q] + dq * dq) - (f[v[k]] + dv * dv)) / (2.0 * (dq - dv));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double dq = static_cast<double>(q);
    while (z[k + 1] < dq) ++k;
    const double dv = static_cast<double>(v[k]);
    out[q] = (dq - dv) * (dq - dv) + f[v[k]];
  }
}

}  // namespace detail

/// Exact squared Euclidean distance from every pixel to the nearest on-pixel of
/// `features`. Infinity everywhere when `features` is empty.
inline RealRaster squared_distance_to(const Mask& features) {
  const std::size_t h = features.height(), w = features.width();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  RealRaster grid(w, h);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = features[i] != 0 ? 0.0 : kInf;

  std::vector<double> line(std::max(w, h)), result(std::max(w, h));
  std::vector<std::size_t> v;
  std::vector<double> z;
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t r = 0; r < h; ++r) line[r] = grid(r, c);
    detail::edt_1d(line.data(), h, result.data(), v, z);
    for (std::size_t r = 0; r < h; ++r) grid(r, c) = result[r];
  }
  for (std::size_t r = 0; r < h; ++r) {
    detail::edt_1d(&grid(r, 0), w, result.data(), v, z);
    for (std::size_t c = 0; c < w; ++c) grid(r, c) = result[c];
  }
  return grid;
}

/// Euclidean distance from each gland pixel to the nearest pixel outside its gland
/// (other labels and off-raster pixels included). Background is 0.
inline RealRaster euclidean_depth(const LabelMap& labels) {
  RealRaster out(labels.width(), labels.height());
  const auto boxes = label_boxes(labels);
  for (Label id = 1; id <= labels.n_labels; ++id) {
    const Box& b = boxes[id - 1];
    // One-pixel margin around the box: every pixel of it lies outside the gland,
    // and no pixel farther away can be closer to an interior point.
    const std::size_t ch = b.height() + 2, cw = b.width() + 2;
    Mask outside(cw, ch, 1);
    for (std::size_t r = 0; r < b.height(); ++r) {
      for (std::size_t c = 0; c < b.width(); ++c) {
        if (labels(b.row0 + r, b.col0 + c) == id) outside(r + 1, c + 1) = 0;
      }
    }
    const RealRaster sq = squared_distance_to(outside);
    for (std::size_t r = 0; r < b.height(); ++r) {
      for (std::size_t c = 0; c < b.width(); ++c) {
        if (labels(b.row0 + r, b.col0 + c) == id) out(b.row0 + r, b.col0 + c) = std::sqrt(sq(r + 1, c + 1));
      }
    }
  }
  return out;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_DISTANCE_HPP
