#ifndef GLANDTOPO_MORPHOLOGY_HPP
#define GLANDTOPO_MORPHOLOGY_HPP

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "glandtopo/raster.hpp"

namespace glandtopo {

enum class Connectivity { Four = 4, Eight = 8 };

/// 3x3 structuring elements. Square has the 8-neighbour footprint, Cross the 4-neighbour one.
enum class StructuringElement { Square3x3, Cross3x3 };

struct Offset {
  int drow;
  int dcol;
};

inline constexpr std::array<Offset, 4> kNeighbors4{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
inline constexpr std::array<Offset, 8> kNeighbors8{
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

inline std::span<const Offset> neighbors(Connectivity conn) {
  if (conn == Connectivity::Four) return kNeighbors4;
  return kNeighbors8;
}

/// Footprint of the SE without its centre pixel.
inline std::span<const Offset> footprint(StructuringElement se) {
  return neighbors(se == StructuringElement::Square3x3 ? Connectivity::Eight : Connectivity::Four);
}

inline Connectivity connectivity_of(StructuringElement se) {
  return se == StructuringElement::Square3x3 ? Connectivity::Eight : Connectivity::Four;
}

/// Labels the on-pixels of `mask`. Labels are numbered in raster order of each
/// component's first pixel, so the result is already canonical.
inline LabelMap connected_components(const Mask& mask, Connectivity conn = Connectivity::Eight) {
  LabelMap out{LabelImage(mask.width(), mask.height()), 0};
  const auto nbrs = neighbors(conn);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t r = 0; r < mask.height(); ++r) {
    for (std::size_t c = 0; c < mask.width(); ++c) {
      if (mask(r, c) == 0 || out.pixels(r, c) != 0) continue;
      const Label id = ++out.n_labels;
      out.pixels(r, c) = id;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        auto [pr, pc] = stack.back();
        stack.pop_back();
        for (const Offset& o : nbrs) {
          const auto qr = static_cast<std::ptrdiff_t>(pr) + o.drow;
          const auto qc = static_cast<std::ptrdiff_t>(pc) + o.dcol;
          if (!mask.contains(qr, qc)) continue;
          const auto ur = static_cast<std::size_t>(qr);
          const auto uc = static_cast<std::size_t>(qc);
          if (mask(ur, uc) == 0 || out.pixels(ur, uc) != 0) continue;
          out.pixels(ur, uc) = id;
          stack.emplace_back(ur, uc);
        }
      }
    }
  }
  return out;
}

/// Binary erosion; pixels outside the raster count as off.
inline Mask erode(const Mask& mask, StructuringElement se = StructuringElement::Square3x3) {
  Mask out(mask.width(), mask.height());
  const auto fp = footprint(se);
  for (std::size_t r = 0; r < mask.height(); ++r) {
    for (std::size_t c = 0; c < mask.width(); ++c) {
      if (mask(r, c) == 0) continue;
      bool keep = true;
      for (const Offset& o : fp) {
        if (mask.get_or(static_cast<std::ptrdiff_t>(r) + o.drow,
                        static_cast<std::ptrdiff_t>(c) + o.dcol, 0) == 0) {
          keep = false;
          break;
        }
      }
      out(r, c) = keep ? 1 : 0;
    }
  }
  return out;
}

/// Binary dilation (both SEs are symmetric, so no reflection is needed).
inline Mask dilate(const Mask& mask, StructuringElement se = StructuringElement::Square3x3) {
  Mask out(mask.width(), mask.height());
  const auto fp = footprint(se);
  for (std::size_t r = 0; r < mask.height(); ++r) {
    for (std::size_t c = 0; c < mask.width(); ++c) {
      if (mask(r, c) == 0) continue;
      out(r, c) = 1;
      for (const Offset& o : fp) {
        const auto qr = static_cast<std::ptrdiff_t>(r) + o.drow;
        const auto qc = static_cast<std::ptrdiff_t>(c) + o.dcol;
        if (mask.contains(qr, qc)) out(static_cast<std::size_t>(qr), static_cast<std::size_t>(qc)) = 1;
      }
    }
  }
  return out;
}

/// Turns on every off-pixel that is not 4-connected to the raster border.
inline Mask fill_holes(const Mask& mask) {
  const std::size_t h = mask.height(), w = mask.width();
  Mask outside(w, h);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  auto seed = [&](std::size_t r, std::size_t c) {
    if (mask(r, c) == 0 && outside(r, c) == 0) {
      outside(r, c) = 1;
      stack.emplace_back(r, c);
    }
  };
  for (std::size_t c = 0; c < w; ++c) {
    seed(0, c);
    seed(h - 1, c);
  }
  for (std::size_t r = 0; r < h; ++r) {
    seed(r, 0);
    seed(r, w - 1);
  }
  while (!stack.empty()) {
    auto [pr, pc] = stack.back();
    stack.pop_back();
    for (const Offset& o : kNeighbors4) {
      const auto qr = static_cast<std::ptrdiff_t>(pr) + o.drow;
      const auto qc = static_cast<std::ptrdiff_t>(pc) + o.dcol;
      if (mask.contains(qr, qc)) seed(static_cast<std::size_t>(qr), static_cast<std::size_t>(qc));
    }
  }
  Mask out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = outside[i] != 0 ? 0 : 1;
  return out;
}

/// Deletes objects whose area is below `min_area`, then renumbers the survivors.
inline LabelMap remove_small(const LabelMap& labels, std::size_t min_area) {
  const auto areas = label_areas(labels);
  LabelImage kept(labels.width(), labels.height());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Label v = labels[i];
    kept[i] = (v != 0 && areas[v] >= min_area) ? v : 0;
  }
  return canonicalize(kept);
}

/// Mask of the pixels carrying `label`.
inline Mask label_mask(const LabelMap& labels, Label label) {
  Mask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = labels[i] == label ? 1 : 0;
  return out;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_MORPHOLOGY_HPP
