#ifndef GLANDTOPO_TOPO_GT_HPP
#define GLANDTOPO_TOPO_GT_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "glandtopo/distance.hpp"
#include "glandtopo/morphology.hpp"
#include "glandtopo/raster.hpp"

namespace glandtopo {

enum class DistanceMetric { MA, Chessboard, Euclidean };

inline std::string_view to_string(DistanceMetric m) {
  switch (m) {
    case DistanceMetric::MA: return "ma";
    case DistanceMetric::Chessboard: return "chessboard";
    case DistanceMetric::Euclidean: return "euclidean";
  }
  return "?";
}

inline DistanceMetric parse_metric(std::string_view s) {
  if (s == "ma") return DistanceMetric::MA;
  if (s == "chessboard") return DistanceMetric::Chessboard;
  if (s == "euclidean") return DistanceMetric::Euclidean;
  throw InvalidArgument("unknown distance metric '" + std::string(s) + "'");
}

/// How a gland's raw depth is scaled into the MA map.
///   MaxNormalized: d / max d, so the skeleton reaches exactly 1.
///   MaxMinusMin:   d / (max d - min d), the textbook form; can exceed 1.
/// Both give 1 on glands whose depth is constant.
enum class Normalization { MaxNormalized, MaxMinusMin };

/// Per-gland normalization of a raw depth field. Background stays 0.
template <typename T>
RealRaster normalize_per_gland(const LabelMap& labels, const Raster<T>& depth,
                               Normalization norm = Normalization::MaxNormalized) {
  require_same_shape(labels, depth, "normalize_per_gland");
  std::vector<double> lo(labels.n_labels + 1, std::numeric_limits<double>::infinity());
  std::vector<double> hi(labels.n_labels + 1, 0.0);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const Label v = labels[i];
    if (v == 0) continue;
    const auto d = static_cast<double>(depth[i]);
    lo[v] = std::min(lo[v], d);
    hi[v] = std::max(hi[v], d);
  }
  RealRaster out(labels.width(), labels.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const Label v = labels[i];
    if (v == 0) continue;
    if (hi[v] == lo[v]) {
      out[i] = 1.0;
      continue;
    }
    const double denom = norm == Normalization::MaxNormalized ? hi[v] : hi[v] - lo[v];
    out[i] = static_cast<double>(depth[i]) / denom;
  }
  return out;
}

/// Medial-axis distance map: normalized erosion depth, 0 on background and 1 on
/// each gland's deepest pixels.
inline RealRaster ma_distance_map(const LabelMap& labels,
                                  StructuringElement se = StructuringElement::Square3x3,
                                  Normalization norm = Normalization::MaxNormalized) {
  return normalize_per_gland(labels, erosion_depth(labels, se), norm);
}

/// Raw distance-to-background under `metric`, then normalized like the MA map.
/// `se` only affects DistanceMetric::MA.
inline RealRaster distance_map(const LabelMap& labels, DistanceMetric metric,
                               StructuringElement se = StructuringElement::Square3x3,
                               Normalization norm = Normalization::MaxNormalized) {
  switch (metric) {
    case DistanceMetric::MA:
      return ma_distance_map(labels, se, norm);
    case DistanceMetric::Chessboard:
      return normalize_per_gland(labels, erosion_depth(labels, StructuringElement::Square3x3), norm);
    case DistanceMetric::Euclidean:
      return normalize_per_gland(labels, euclidean_depth(labels), norm);
  }
  throw InvalidArgument("unknown distance metric");
}

/// Pixels removed within the first `thickness` erosions of their gland.
inline Mask contour_map(const LabelMap& labels, std::uint32_t thickness,
                        StructuringElement se = StructuringElement::Square3x3) {
  if (thickness < 1) throw InvalidArgument("contour_map: thickness must be >= 1");
  const DepthMap depth = erosion_depth(labels, se);
  Mask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (depth[i] != 0 && depth[i] <= thickness) ? 1 : 0;
  return out;
}

/// Seed regions: 8-connected components of {ma >= tau_m}, holes filled, components
/// smaller than `min_area` dropped.
inline LabelMap marker_gt(const RealRaster& ma, double tau_m, std::size_t min_area) {
  if (!(tau_m > 0.0 && tau_m < 1.0)) throw InvalidArgument("marker_gt: tau_m must lie in (0, 1)");
  Mask seeds(ma.width(), ma.height());
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = ma[i] >= tau_m ? 1 : 0;
  return remove_small(connected_components(fill_holes(seeds), Connectivity::Eight), min_area);
}

namespace detail {

// Ring order around p: N, NE, E, SE, S, SW, W, NW.
inline constexpr std::array<Offset, 8> kRing{
    {{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

/// Counts components of the ring positions selected by `bits` (bit i = kRing[i]),
/// using 8- or 4-adjacency inside the 3x3 window minus its centre. When
/// `touching_centre_only` is set, only components containing an edge neighbour of
/// p (N, E, S or W) are counted.
constexpr int ring_components(unsigned bits, bool eight, bool touching_centre_only) {
  int count = 0;
  unsigned seen = 0;
  for (int start = 0; start < 8; ++start) {
    if (!((bits >> start) & 1u) || ((seen >> start) & 1u)) continue;
    unsigned stack = 1u << start;
    unsigned comp = 0;
    while (stack) {
      int i = 0;
      while (!((stack >> i) & 1u)) ++i;
      stack &= ~(1u << i);
      if ((comp >> i) & 1u) continue;
      comp |= 1u << i;
      for (int j = 0; j < 8; ++j) {
        if (!((bits >> j) & 1u) || ((comp >> j) & 1u)) continue;
        const int dr = kRing[i].drow - kRing[j].drow;
        const int dc = kRing[i].dcol - kRing[j].dcol;
        const int adr = dr < 0 ? -dr : dr, adc = dc < 0 ? -dc : dc;
        const bool adjacent = eight ? (adr <= 1 && adc <= 1) : (adr + adc == 1);
        if (adjacent) stack |= 1u << j;
      }
    }
    seen |= comp;
    if (touching_centre_only && !(comp & 0b01010101u)) continue;
    ++count;
  }
  return count;
}

/// simple[cfg] is true when deleting a foreground pixel with ring configuration cfg
/// preserves topology (8-connected foreground, 4-connected background).
constexpr std::array<bool, 256> make_simple_table() {
  std::array<bool, 256> table{};
  for (unsigned cfg = 0; cfg < 256; ++cfg) {
    table[cfg] = ring_components(cfg, true, false) == 1 &&
                 ring_components(~cfg & 0xFFu, false, true) == 1;
  }
  return table;
}

inline constexpr std::array<bool, 256> kSimple = make_simple_table();

inline unsigned ring_config(const Mask& m, std::ptrdiff_t r, std::ptrdiff_t c) {
  unsigned cfg = 0;
  for (unsigned i = 0; i < 8; ++i) {
    if (m.get_or(r + kRing[i].drow, c + kRing[i].dcol, 0) != 0) cfg |= 1u << i;
  }
  return cfg;
}

inline bool is_simple(const Mask& m, std::ptrdiff_t r, std::ptrdiff_t c) {
  return kSimple[ring_config(m, r, c)];
}

struct Px {
  std::ptrdiff_t r, c;
};

/// Thins one gland given as a padded crop (`body`) with its erosion depth.
inline void thin_gland(Mask& body, const DepthMap& depth) {
  const auto H = static_cast<std::ptrdiff_t>(body.height());
  const auto W = static_cast<std::ptrdiff_t>(body.width());
  std::uint32_t max_depth = 0;
  for (auto d : depth) max_depth = std::max(max_depth, d);
  if (max_depth == 0) return;

  // Anchors are centres of maximal squares: no 8-neighbour lies deeper.
  std::vector<std::vector<Px>> levels(max_depth + 1);
  for (std::ptrdiff_t r = 0; r < H; ++r) {
    for (std::ptrdiff_t c = 0; c < W; ++c) {
      const std::uint32_t d = depth(r, c);
      if (d == 0) continue;
      bool anchor = true;
      for (const Offset& o : kNeighbors8) {
        if (depth.get_or(r + o.drow, c + o.dcol, 0) > d) {
          anchor = false;
          break;
        }
      }
      if (!anchor) levels[d].push_back({r, c});
    }
  }

  // Peel level by level from the contour inward. Pixels that survive a level
  // (needed for connectivity at the time) are re-examined at every later level.
  std::vector<Px> pending;
  for (std::uint32_t level = 1; level <= max_depth; ++level) {
    std::vector<Px> candidates;
    candidates.reserve(pending.size() + levels[level].size());
    std::merge(pending.begin(), pending.end(), levels[level].begin(), levels[level].end(),
               std::back_inserter(candidates),
               [](const Px& a, const Px& b) { return a.r != b.r ? a.r < b.r : a.c < b.c; });
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<Px> kept;
      kept.reserve(candidates.size());
      for (const Px& p : candidates) {
        if (is_simple(body, p.r, p.c)) {
          body(p.r, p.c) = 0;
          changed = true;
        } else {
          kept.push_back(p);
        }
      }
      candidates.swap(kept);
    }
    pending.swap(candidates);
  }

  // Anchor plateaus of even width leave 2x2 blocks. Delete the shallowest simple
  // pixel of each block, never the gland's last deepest pixel.
  std::size_t deepest_left = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != 0 && depth[i] == max_depth) ++deepest_left;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::ptrdiff_t r = 0; r + 1 < H; ++r) {
      for (std::ptrdiff_t c = 0; c + 1 < W; ++c) {
        if (!(body(r, c) && body(r, c + 1) && body(r + 1, c) && body(r + 1, c + 1))) continue;
        std::array<Px, 4> block{{{r, c}, {r, c + 1}, {r + 1, c}, {r + 1, c + 1}}};
        std::stable_sort(block.begin(), block.end(),
                         [&](const Px& a, const Px& b) { return depth(a.r, a.c) < depth(b.r, b.c); });
        for (const Px& p : block) {
          const bool deepest = depth(p.r, p.c) == max_depth;
          if (deepest && deepest_left <= 1) continue;
          if (!is_simple(body, p.r, p.c)) continue;
          body(p.r, p.c) = 0;
          if (deepest) --deepest_left;
          changed = true;
          break;
        }
      }
    }
  }
}

}  // namespace detail

/// Topology-preserving skeleton of every gland, each thinned in isolation.
/// Pixels are peeled in erosion-depth order; centres of maximal squares are kept,
/// plus whatever is needed to keep the gland's components and holes.
inline Mask skeletonize(const LabelMap& labels, StructuringElement se = StructuringElement::Square3x3) {
  const DepthMap depth = erosion_depth(labels, se);
  const auto boxes = label_boxes(labels);
  Mask out(labels.width(), labels.height());
  for (Label id = 1; id <= labels.n_labels; ++id) {
    const Box& b = boxes[id - 1];
    const std::size_t ch = b.height() + 2, cw = b.width() + 2;
    Mask body(cw, ch);
    DepthMap local(cw, ch);
    for (std::size_t r = 0; r < b.height(); ++r) {
      for (std::size_t c = 0; c < b.width(); ++c) {
        if (labels(b.row0 + r, b.col0 + c) != id) continue;
        body(r + 1, c + 1) = 1;
        local(r + 1, c + 1) = depth(b.row0 + r, b.col0 + c);
      }
    }
    detail::thin_gland(body, local);
    for (std::size_t r = 0; r < b.height(); ++r) {
      for (std::size_t c = 0; c < b.width(); ++c) {
        if (body(r + 1, c + 1)) out(b.row0 + r, b.col0 + c) = 1;
      }
    }
  }
  return out;
}

/// Everything gen-gt derives from one label map.
struct GroundTruthOptions {
  DistanceMetric metric = DistanceMetric::MA;
  StructuringElement se = StructuringElement::Square3x3;
  Normalization normalization = Normalization::MaxNormalized;
  double tau_m = 0.7;
  std::size_t min_marker_area = 16;
  std::uint32_t contour_thickness = 1;
};

struct GroundTruthSet {
  RealRaster distance;  ///< normalized distance map under the chosen metric
  Mask skeleton;
  Mask contour;
  LabelMap markers;
};

inline GroundTruthSet make_ground_truth(const LabelMap& labels, const GroundTruthOptions& opt = {}) {
  GroundTruthSet gt;
  gt.distance = distance_map(labels, opt.metric, opt.se, opt.normalization);
  gt.skeleton = skeletonize(labels, opt.se);
  gt.contour = contour_map(labels, opt.contour_thickness, opt.se);
  gt.markers = marker_gt(gt.distance, opt.tau_m, opt.min_marker_area);
  return gt;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_TOPO_GT_HPP
