#ifndef GLANDTOPO_POSTPROCESS_HPP
#define GLANDTOPO_POSTPROCESS_HPP

#include <cstddef>
#include <string>

#include "glandtopo/morphology.hpp"
#include "glandtopo/raster.hpp"
#include "glandtopo/topo_gt.hpp"
#include "glandtopo/watershed.hpp"

namespace glandtopo {

struct PostprocessConfig {
  double tau_b = 0.5;  ///< instance-probability threshold
  double tau_m = 0.7;  ///< marker threshold on the MA map
  std::size_t min_gland_area = 100;
  std::size_t min_marker_area = 16;
  /// Square3x3 floods and labels with 8-connectivity, Cross3x3 with 4.
  StructuringElement se = StructuringElement::Square3x3;

  void validate() const {
    if (!(tau_b > 0.0 && tau_b < 1.0)) throw InvalidArgument("tau_b must lie in (0, 1)");
    if (!(tau_m > 0.0 && tau_m < 1.0)) throw InvalidArgument("tau_m must lie in (0, 1)");
  }
};

inline Mask binarize(const RealRaster& prob, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("binarize: tau must lie in (0, 1)");
  Mask out(prob.width(), prob.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = prob[i] >= tau ? 1 : 0;
  return out;
}

/// Intermediate products of the pipeline, kept for inspection and testing.
struct PostprocessResult {
  Mask region;
  LabelMap markers;
  LabelMap labels;
};

/// Binarize -> clean region -> markers from the MA map -> watershed on -MA -> clean.
inline PostprocessResult postprocess_detailed(const RealRaster& inst_prob, const RealRaster& ma_pred,
                                              const PostprocessConfig& cfg = {}) {
  cfg.validate();
  require_same_shape(inst_prob, ma_pred, "postprocess: instance/MA maps");
  require_finite(inst_prob, "instance probabilities");
  require_finite(ma_pred, "MA prediction");
  const Connectivity conn = connectivity_of(cfg.se);

  PostprocessResult res;
  const LabelMap blobs = remove_small(connected_components(binarize(inst_prob, cfg.tau_b), conn),
                                      cfg.min_gland_area);
  res.region = fill_holes(foreground(blobs));

  // Predicted maps can disagree: marker pixels outside the region are dropped.
  const LabelMap raw_markers = marker_gt(ma_pred, cfg.tau_m, cfg.min_marker_area);
  LabelImage clipped(raw_markers.pixels);
  for (std::size_t i = 0; i < clipped.size(); ++i) {
    if (res.region[i] == 0) clipped[i] = 0;
  }
  res.markers = canonicalize(clipped);

  RealRaster elevation(ma_pred.width(), ma_pred.height());
  for (std::size_t i = 0; i < elevation.size(); ++i) elevation[i] = -ma_pred[i];

  res.labels = remove_small(watershed(res.region, elevation, res.markers, conn), cfg.min_gland_area);
  return res;
}

inline LabelMap postprocess_pipeline(const RealRaster& inst_prob, const RealRaster& ma_pred,
                                     const PostprocessConfig& cfg = {}) {
  return postprocess_detailed(inst_prob, ma_pred, cfg).labels;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_POSTPROCESS_HPP
