#ifndef GLANDTOPO_LOSSES_HPP
#define GLANDTOPO_LOSSES_HPP

#include <algorithm>
#include <cmath>

#include "glandtopo/raster.hpp"

namespace glandtopo {

/// A scalar loss and its gradient with respect to one prediction raster.
struct LossValue {
  double value = 0.0;
  RealRaster gradient;
};

inline constexpr double kProbabilityEpsilon = 1e-12;
inline constexpr double kDiceSmoothing = 1.0;

/// Binary cross-entropy on the foreground channel, averaged over pixels.
/// Predictions are clamped to [eps, 1 - eps]; the gradient is zero where clamping bites.
inline LossValue ce_instance_loss(const RealRaster& pred_fg, const Mask& gt_fg) {
  require_same_shape(pred_fg, gt_fg, "ce_instance_loss");
  const double m = static_cast<double>(pred_fg.size());
  LossValue out{0.0, RealRaster(pred_fg.width(), pred_fg.height())};
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_fg.size(); ++i) {
    const double raw = pred_fg[i];
    const double p = std::clamp(raw, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    const bool y = gt_fg[i] != 0;
    sum += y ? std::log(p) : std::log1p(-p);
    if (raw == p) out.gradient[i] = (y ? -1.0 / p : 1.0 / (1.0 - p)) / m;
  }
  out.value = -sum / m;
  return out;
}

/// Mean squared error between predicted and true MA maps.
inline LossValue ma_loss(const RealRaster& pred_ma, const RealRaster& gt_ma) {
  require_same_shape(pred_ma, gt_ma, "ma_loss");
  const double m = static_cast<double>(pred_ma.size());
  LossValue out{0.0, RealRaster(pred_ma.width(), pred_ma.height())};
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_ma.size(); ++i) {
    const double diff = pred_ma[i] - gt_ma[i];
    sum += diff * diff;
    out.gradient[i] = 2.0 * diff / m;
  }
  out.value = sum / m;
  return out;
}

/// Soft Dice loss 1 - (2 sum(p y) + s) / (sum p + sum y + s).
inline LossValue marker_loss(const RealRaster& pred_mc, const Mask& gt_mc,
                             double smoothing = kDiceSmoothing) {
  require_same_shape(pred_mc, gt_mc, "marker_loss");
  double inter = 0.0, psum = 0.0, ysum = 0.0;
  for (std::size_t i = 0; i < pred_mc.size(); ++i) {
    const double y = gt_mc[i] != 0 ? 1.0 : 0.0;
    inter += pred_mc[i] * y;
    psum += pred_mc[i];
    ysum += y;
  }
  const double num = 2.0 * inter + smoothing;
  const double den = psum + ysum + smoothing;
  LossValue out{1.0 - num / den, RealRaster(pred_mc.width(), pred_mc.height())};
  for (std::size_t i = 0; i < pred_mc.size(); ++i) {
    const double y = gt_mc[i] != 0 ? 1.0 : 0.0;
    out.gradient[i] = -(2.0 * y * den - num) / (den * den);
  }
  return out;
}

/// Differentiable stand-in for thresholding the MA map at tau_m.
struct SoftMarkerParams {
  double tau_m = 0.7;
  double steepness = 50.0;
};

inline RealRaster soft_markers(const RealRaster& pred_ma, const SoftMarkerParams& params = {}) {
  RealRaster out(pred_ma.width(), pred_ma.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-params.steepness * (pred_ma[i] - params.tau_m)));
  }
  return out;
}

struct TopologyLoss {
  double value = 0.0;
  double l_ma = 0.0;
  double l_mc = 0.0;
  RealRaster grad_ma;
  RealRaster grad_mc;
};

/// L_MA + L_MC with separate gradients for the MA and marker predictions.
inline TopologyLoss topology_loss(const RealRaster& pred_ma, const RealRaster& gt_ma,
                                  const RealRaster& pred_mc, const Mask& gt_mc) {
  require_same_shape(pred_ma, pred_mc, "topology_loss");
  LossValue ma = ma_loss(pred_ma, gt_ma);
  LossValue mc = marker_loss(pred_mc, gt_mc);
  return {ma.value + mc.value, ma.value, mc.value, std::move(ma.gradient), std::move(mc.gradient)};
}

/// Topology loss with markers derived from the MA prediction through soft_markers;
/// grad_ma carries both terms (chain rule through the sigmoid), grad_mc the marker term alone.
inline TopologyLoss topology_loss_from_ma(const RealRaster& pred_ma, const RealRaster& gt_ma,
                                          const Mask& gt_mc, const SoftMarkerParams& params = {}) {
  const RealRaster mc = soft_markers(pred_ma, params);
  TopologyLoss out = topology_loss(pred_ma, gt_ma, mc, gt_mc);
  for (std::size_t i = 0; i < mc.size(); ++i) {
    out.grad_ma[i] += out.grad_mc[i] * params.steepness * mc[i] * (1.0 - mc[i]);
  }
  return out;
}

struct LossWeights {
  double alpha = 1.0;
};

struct LossInputs {
  const RealRaster& pred_fg;
  const Mask& gt_fg;
  const RealRaster& pred_ma;
  const RealRaster& gt_ma;
  const RealRaster& pred_mc;
  const Mask& gt_mc;
};

struct TotalLoss {
  double value = 0.0;
  double l_inst = 0.0;
  double l_ma = 0.0;
  double l_mc = 0.0;
  double l_top = 0.0;
  RealRaster grad_fg;
  RealRaster grad_ma;
  RealRaster grad_mc;
};

/// L_INST + alpha * L_TOP.
inline TotalLoss total_loss(const LossInputs& in, LossWeights weights = {}) {
  if (!(weights.alpha >= 0.0)) throw InvalidArgument("total_loss: alpha must be >= 0");
  require_same_shape(in.pred_fg, in.pred_ma, "total_loss");
  LossValue inst = ce_instance_loss(in.pred_fg, in.gt_fg);
  TopologyLoss top = topology_loss(in.pred_ma, in.gt_ma, in.pred_mc, in.gt_mc);
  TotalLoss out;
  out.l_inst = inst.value;
  out.l_ma = top.l_ma;
  out.l_mc = top.l_mc;
  out.l_top = top.value;
  out.value = inst.value + weights.alpha * top.value;
  out.grad_fg = std::move(inst.gradient);
  out.grad_ma = std::move(top.grad_ma);
  out.grad_mc = std::move(top.grad_mc);
  for (double& g : out.grad_ma) g *= weights.alpha;
  for (double& g : out.grad_mc) g *= weights.alpha;
  return out;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_LOSSES_HPP
