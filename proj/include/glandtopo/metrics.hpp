#ifndef GLANDTOPO_METRICS_HPP
#define GLANDTOPO_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "glandtopo/distance.hpp"
#include "glandtopo/raster.hpp"

namespace glandtopo {

/// When a predicted object counts as detecting a ground-truth object.
enum class MatchRule {
  GtOverlap,  ///< |S n G| / |G| > 0.5
  IoU,        ///< |S n G| / |S u G| > 0.5
};

struct ObjectMatch {
  Label gt_id = 0;    ///< 0 when the predicted object overlaps nothing
  Label pred_id = 0;  ///< 0 for a missed ground-truth object
  std::size_t overlap = 0;
  double overlap_fraction = 0.0;  ///< overlap / |G|
  bool true_positive = false;
};

/// Pixel-overlap table between two label maps, built in a single pass.
class OverlapTable {
 public:
  OverlapTable(const LabelMap& pred, const LabelMap& gt)
      : pred_area_(label_areas(pred)), gt_area_(label_areas(gt)),
        pred_first_(first_pixels(pred)), gt_first_(first_pixels(gt)),
        pred_best_(pred.n_labels + 1, {0, 0}), gt_best_(gt.n_labels + 1, {0, 0}) {
    require_same_shape(pred, gt, "metrics: pred/gt");
    for (std::size_t i = 0; i < pred.pixels.size(); ++i) {
      const Label s = pred[i], g = gt[i];
      if (s != 0 && g != 0) ++counts_[key(s, g)];
    }
    // Ties go to the counterpart that appears first in scan order.
    for (const auto& [k, n] : counts_) {
      const auto s = static_cast<Label>(k >> 32), g = static_cast<Label>(k & 0xFFFFFFFFu);
      auto& pb = pred_best_[s];
      if (n > pb.second || (n == pb.second && gt_first_[g] < gt_first_[pb.first])) pb = {g, n};
      auto& gb = gt_best_[g];
      if (n > gb.second || (n == gb.second && pred_first_[s] < pred_first_[gb.first])) gb = {s, n};
    }
  }

  std::size_t overlap(Label pred_id, Label gt_id) const {
    auto it = counts_.find(key(pred_id, gt_id));
    return it == counts_.end() ? 0 : it->second;
  }
  Label n_pred() const { return static_cast<Label>(pred_area_.size() - 1); }
  Label n_gt() const { return static_cast<Label>(gt_area_.size() - 1); }
  std::size_t pred_first(Label id) const { return pred_first_[id]; }
  std::size_t pred_area(Label id) const { return pred_area_[id]; }
  std::size_t gt_area(Label id) const { return gt_area_[id]; }
  /// Maximally overlapping counterpart (0 if none) and the overlap size.
  std::pair<Label, std::size_t> best_gt_for(Label pred_id) const { return pred_best_[pred_id]; }
  std::pair<Label, std::size_t> best_pred_for(Label gt_id) const { return gt_best_[gt_id]; }

 private:
  static std::uint64_t key(Label s, Label g) { return (std::uint64_t{s} << 32) | g; }
  static std::vector<std::size_t> first_pixels(const LabelMap& m) {
    std::vector<std::size_t> first(m.n_labels + 1, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = m.pixels.size(); i-- > 0;) first[m[i]] = i;
    return first;
  }

  std::map<std::uint64_t, std::size_t> counts_;
  std::vector<std::size_t> pred_area_, gt_area_;
  std::vector<std::size_t> pred_first_, gt_first_;
  std::vector<std::pair<Label, std::size_t>> pred_best_, gt_best_;
};

/// One entry per predicted object (in id order), then one per missed GT object.
/// Each predicted object is tied to its maximal-overlap GT object; qualifying
/// pairs claim GT objects greedily by descending overlap, one claim per GT object.
inline std::vector<ObjectMatch> match_objects(const LabelMap& pred, const LabelMap& gt,
                                              MatchRule rule = MatchRule::GtOverlap) {
  const OverlapTable table(pred, gt);
  std::vector<ObjectMatch> matches;
  matches.reserve(pred.n_labels + gt.n_labels);
  for (Label s = 1; s <= pred.n_labels; ++s) {
    const auto [g, n] = table.best_gt_for(s);
    ObjectMatch m{g, s, n, 0.0, false};
    if (g != 0) m.overlap_fraction = static_cast<double>(n) / static_cast<double>(table.gt_area(g));
    matches.push_back(m);
  }

  auto qualifies = [&](const ObjectMatch& m) {
    if (m.gt_id == 0) return false;
    if (rule == MatchRule::GtOverlap) return m.overlap_fraction > 0.5;
    const double uni = static_cast<double>(table.pred_area(m.pred_id) + table.gt_area(m.gt_id) - m.overlap);
    return static_cast<double>(m.overlap) / uni > 0.5;
  };
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (qualifies(matches[i])) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (matches[a].overlap != matches[b].overlap) return matches[a].overlap > matches[b].overlap;
                     return table.pred_first(matches[a].pred_id) < table.pred_first(matches[b].pred_id);
                   });
  std::vector<bool> claimed(gt.n_labels + 1, false);
  for (std::size_t i : order) {
    ObjectMatch& m = matches[i];
    if (claimed[m.gt_id]) continue;
    claimed[m.gt_id] = true;
    m.true_positive = true;
  }
  for (Label g = 1; g <= gt.n_labels; ++g) {
    if (!claimed[g]) matches.push_back({g, 0, 0, 0.0, false});
  }
  return matches;
}

struct DetectionScore {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
};

/// Object-level F1. Both maps empty scores 1.
inline DetectionScore object_f1(const LabelMap& pred, const LabelMap& gt,
                                MatchRule rule = MatchRule::GtOverlap) {
  DetectionScore s;
  for (const ObjectMatch& m : match_objects(pred, gt, rule)) {
    if (m.pred_id == 0) continue;
    if (m.true_positive) ++s.tp; else ++s.fp;
  }
  s.fn = gt.n_labels - s.tp;
  if (pred.n_labels == 0 && gt.n_labels == 0) {
    s.f1 = s.precision = s.recall = 1.0;
    return s;
  }
  s.precision = pred.n_labels ? static_cast<double>(s.tp) / pred.n_labels : 0.0;
  s.recall = gt.n_labels ? static_cast<double>(s.tp) / gt.n_labels : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

/// Area-weighted two-sided Dice between each object and its maximal-overlap
/// counterpart. Both maps empty scores 1.
inline double object_dice(const LabelMap& pred, const LabelMap& gt) {
  const OverlapTable t(pred, gt);
  if (t.n_pred() == 0 && t.n_gt() == 0) return 1.0;
  double total_gt = 0.0, total_pred = 0.0;
  for (Label g = 1; g <= t.n_gt(); ++g) total_gt += static_cast<double>(t.gt_area(g));
  for (Label s = 1; s <= t.n_pred(); ++s) total_pred += static_cast<double>(t.pred_area(s));

  double gt_side = 0.0;
  for (Label g = 1; g <= t.n_gt(); ++g) {
    const auto [s, n] = t.best_pred_for(g);
    const double dice = s == 0 ? 0.0
                               : 2.0 * static_cast<double>(n) /
                                     static_cast<double>(t.gt_area(g) + t.pred_area(s));
    gt_side += static_cast<double>(t.gt_area(g)) * dice;
  }
  double pred_side = 0.0;
  for (Label s = 1; s <= t.n_pred(); ++s) {
    const auto [g, n] = t.best_gt_for(s);
    const double dice = g == 0 ? 0.0
                               : 2.0 * static_cast<double>(n) /
                                     static_cast<double>(t.pred_area(s) + t.gt_area(g));
    pred_side += static_cast<double>(t.pred_area(s)) * dice;
  }
  // An empty side contributes nothing.
  if (total_gt > 0.0) gt_side /= total_gt;
  if (total_pred > 0.0) pred_side /= total_pred;
  return 0.5 * (gt_side + pred_side);
}

/// Boundary pixels of every object: pixels with a 4-neighbour carrying another
/// label, background, or lying off the raster. Index = label - 1.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> object_boundaries(const LabelMap& labels) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out(labels.n_labels);
  for (std::size_t r = 0; r < labels.height(); ++r) {
    for (std::size_t c = 0; c < labels.width(); ++c) {
      const Label v = labels(r, c);
      if (v == 0) continue;
      for (const Offset& o : kNeighbors4) {
        if (labels.pixels.get_or(static_cast<std::ptrdiff_t>(r) + o.drow,
                                 static_cast<std::ptrdiff_t>(c) + o.dcol, 0) != v) {
          out[v - 1].emplace_back(r, c);
          break;
        }
      }
    }
  }
  return out;
}

/// Symmetric Hausdorff distance between two non-empty pixel sets, via exact EDTs
/// over their joint bounding box.
inline double hausdorff_distance(const std::vector<std::pair<std::size_t, std::size_t>>& a,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  std::size_t r0 = a[0].first, r1 = r0, c0 = a[0].second, c1 = c0;
  for (const auto* set : {&a, &b}) {
    for (auto [r, c] : *set) {
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
    }
  }
  const std::size_t h = r1 - r0 + 1, w = c1 - c0 + 1;
  auto directed = [&](const auto& from, const auto& to) {
    Mask features(w, h);
    for (auto [r, c] : to) features(r - r0, c - c0) = 1;
    const RealRaster sq = squared_distance_to(features);
    double worst = 0.0;
    for (auto [r, c] : from) worst = std::max(worst, sq(r - r0, c - c0));
    return worst;
  };
  return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

/// Area-weighted two-sided Hausdorff distance. An object without overlapping
/// counterpart is paired with the counterpart at minimal Hausdorff distance. A side
/// with no objects at all (while the other has some) contributes the image diagonal.
inline double object_hausdorff(const LabelMap& pred, const LabelMap& gt) {
  const OverlapTable t(pred, gt);
  if (t.n_pred() == 0 && t.n_gt() == 0) return 0.0;
  const double diagonal = std::hypot(static_cast<double>(pred.width()), static_cast<double>(pred.height()));
  if (t.n_pred() == 0 || t.n_gt() == 0) return diagonal;

  const auto pred_bd = object_boundaries(pred);
  const auto gt_bd = object_boundaries(gt);

  auto side = [&](Label n, auto area_of, auto best_of, const auto& own_bd, const auto& other_bd) {
    double total = 0.0;
    for (Label i = 1; i <= n; ++i) total += static_cast<double>(area_of(i));
    double sum = 0.0;
    for (Label i = 1; i <= n; ++i) {
      const Label j = best_of(i);
      double h;
      if (j != 0) {
        h = hausdorff_distance(own_bd[i - 1], other_bd[j - 1]);
      } else {
        h = std::numeric_limits<double>::infinity();
        for (const auto& cand : other_bd) h = std::min(h, hausdorff_distance(own_bd[i - 1], cand));
      }
      sum += static_cast<double>(area_of(i)) * h;
    }
    return sum / total;
  };
  const double gt_side = side(
      t.n_gt(), [&](Label g) { return t.gt_area(g); }, [&](Label g) { return t.best_pred_for(g).first; },
      gt_bd, pred_bd);
  const double pred_side = side(
      t.n_pred(), [&](Label s) { return t.pred_area(s); }, [&](Label s) { return t.best_gt_for(s).first; },
      pred_bd, gt_bd);
  return 0.5 * (gt_side + pred_side);
}

struct MetricsReport {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double obj_dice = 0.0;
  double obj_hausdorff = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
};

inline MetricsReport evaluate(const LabelMap& pred, const LabelMap& gt, MatchRule rule = MatchRule::GtOverlap) {
  const DetectionScore det = object_f1(pred, gt, rule);
  MetricsReport r;
  r.f1 = det.f1;
  r.precision = det.precision;
  r.recall = det.recall;
  r.tp = det.tp;
  r.fp = det.fp;
  r.fn = det.fn;
  r.obj_dice = object_dice(pred, gt);
  r.obj_hausdorff = object_hausdorff(pred, gt);
  return r;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_METRICS_HPP
