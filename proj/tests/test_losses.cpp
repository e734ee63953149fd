#include <gtest/gtest.h>

#include <functional>

#include "oracles.hpp"

using namespace glandtopo;

namespace {

constexpr double kStep = 1e-4;

RealRaster random_raster(Rng& rng, std::size_t w, std::size_t h, double lo, double hi) {
  RealRaster r(w, h);
  for (double& v : r) v = rng.uniform(lo, hi);
  return r;
}

Mask random_mask(Rng& rng, std::size_t w, std::size_t h) {
  Mask m(w, h);
  for (auto& v : m) v = rng.coin() ? 1 : 0;
  return m;
}

RealRaster as_real(const Mask& m) {
  RealRaster r(m.width(), m.height());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = m[i];
  return r;
}

/// Worst per-element relative error between an analytic gradient and a fourth-order
/// central difference.
double gradient_error(const std::function<double(const RealRaster&)>& f, const RealRaster& x,
                      const RealRaster& analytic) {
  double worst = 0.0;
  RealRaster probe = x;
  auto at = [&](std::size_t i, double offset) {
    probe[i] = x[i] + offset;
    const double v = f(probe);
    probe[i] = x[i];
    return v;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double numeric =
        (8.0 * (at(i, kStep) - at(i, -kStep)) - (at(i, 2 * kStep) - at(i, -2 * kStep))) / (12.0 * kStep);
    const double scale = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-8});
    worst = std::max(worst, std::fabs(numeric - analytic[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST(CeLoss, ZeroAtGroundTruthAndLn2AtHalf) {
  Rng rng(1);
  const Mask gt = random_mask(rng, 8, 8);
  EXPECT_LE(ce_instance_loss(as_real(gt), gt).value, 1e-10);
  EXPECT_NEAR(ce_instance_loss(RealRaster(8, 8, 0.5), gt).value, std::log(2.0), 1e-15);
}

TEST(CeLoss, ClampedPixelsHaveZeroGradient) {
  Mask gt(2, 1);
  gt[0] = 1;
  const RealRaster pred(2, 1, {1.0, 0.0});
  const LossValue l = ce_instance_loss(pred, gt);
  EXPECT_EQ(l.gradient[0], 0.0);
  EXPECT_EQ(l.gradient[1], 0.0);
  EXPECT_TRUE(std::isfinite(l.value));
}

TEST(CeLoss, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Mask gt = random_mask(rng, 8, 8);
    const RealRaster pred = random_raster(rng, 8, 8, 0.05, 0.95);
    const LossValue l = ce_instance_loss(pred, gt);
    const double err = gradient_error([&](const RealRaster& p) { return ce_instance_loss(p, gt).value; }, pred,
                                      l.gradient);
    ASSERT_LT(err, 1e-4) << "seed " << seed;
  }
}

TEST(CeLoss, ShapeMismatchRejected) {
  EXPECT_THROW(ce_instance_loss(RealRaster(3, 3), Mask(3, 4)), DimensionError);
}

TEST(MaLoss, ZeroAndConstantOffset) {
  Rng rng(2);
  const RealRaster gt = random_raster(rng, 8, 8, 0.0, 1.0);
  EXPECT_EQ(ma_loss(gt, gt).value, 0.0);
  RealRaster shifted = gt;
  for (double& v : shifted) v += 0.1;
  EXPECT_NEAR(ma_loss(shifted, gt).value, 0.01, 1e-15);
}

TEST(MaLoss, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const RealRaster gt = random_raster(rng, 8, 8, 0.0, 1.0);
    const RealRaster pred = random_raster(rng, 8, 8, -0.5, 1.5);
    const LossValue l = ma_loss(pred, gt);
    ASSERT_LT(gradient_error([&](const RealRaster& p) { return ma_loss(p, gt).value; }, pred, l.gradient), 1e-6);
  }
}

TEST(MarkerLoss, PerfectAndInverted) {
  Rng rng(3);
  Mask gt = random_mask(rng, 8, 8);
  gt[0] = 1;
  const double ysum = static_cast<double>(count_on(gt));
  const double perfect = marker_loss(as_real(gt), gt).value;
  EXPECT_GE(perfect, 0.0);
  EXPECT_LT(perfect, kDiceSmoothing / (2.0 * ysum + kDiceSmoothing));
  RealRaster inv(8, 8);
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = gt[i] ? 0.0 : 1.0;
  EXPECT_NEAR(marker_loss(inv, gt).value, 1.0, kDiceSmoothing / (inv.size() + kDiceSmoothing) + 1e-15);
}

TEST(MarkerLoss, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Mask gt = random_mask(rng, 8, 8);
    const RealRaster pred = random_raster(rng, 8, 8, 0.0, 1.0);
    const LossValue l = marker_loss(pred, gt);
    ASSERT_LT(gradient_error([&](const RealRaster& p) { return marker_loss(p, gt).value; }, pred, l.gradient),
              1e-4);
  }
}

TEST(TopologyLoss, AdditiveAndZeroAtTruth) {
  Rng rng(4);
  const RealRaster gt_ma = random_raster(rng, 8, 8, 0.0, 1.0);
  const Mask gt_mc = random_mask(rng, 8, 8);
  const RealRaster pred_ma = random_raster(rng, 8, 8, 0.0, 1.0);
  const RealRaster pred_mc = random_raster(rng, 8, 8, 0.0, 1.0);
  const TopologyLoss t = topology_loss(pred_ma, gt_ma, pred_mc, gt_mc);
  EXPECT_EQ(t.value, ma_loss(pred_ma, gt_ma).value + marker_loss(pred_mc, gt_mc).value);
  EXPECT_EQ(t.grad_ma, ma_loss(pred_ma, gt_ma).gradient);
  EXPECT_EQ(t.grad_mc, marker_loss(pred_mc, gt_mc).gradient);

  const TopologyLoss zero = topology_loss(gt_ma, gt_ma, as_real(gt_mc), gt_mc);
  EXPECT_EQ(zero.l_ma, 0.0);
  EXPECT_LT(zero.l_mc, kDiceSmoothing / (2.0 * double(count_on(gt_mc)) + kDiceSmoothing));
}

TEST(TopologyLoss, GradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const RealRaster gt_ma = random_raster(rng, 8, 8, 0.0, 1.0);
    const Mask gt_mc = random_mask(rng, 8, 8);
    const RealRaster pred_ma = random_raster(rng, 8, 8, 0.0, 1.0);
    const RealRaster pred_mc = random_raster(rng, 8, 8, 0.0, 1.0);
    const TopologyLoss t = topology_loss(pred_ma, gt_ma, pred_mc, gt_mc);
    ASSERT_LT(gradient_error([&](const RealRaster& p) { return topology_loss(p, gt_ma, pred_mc, gt_mc).value; },
                             pred_ma, t.grad_ma),
              1e-4);
    ASSERT_LT(gradient_error([&](const RealRaster& p) { return topology_loss(pred_ma, gt_ma, p, gt_mc).value; },
                             pred_mc, t.grad_mc),
              1e-4);
  }
}

TEST(TopologyLoss, SoftMarkerChainRuleMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const RealRaster gt_ma = random_raster(rng, 8, 8, 0.0, 1.0);
    const Mask gt_mc = random_mask(rng, 8, 8);
    const RealRaster pred_ma = random_raster(rng, 8, 8, 0.5, 0.9);
    const TopologyLoss t = topology_loss_from_ma(pred_ma, gt_ma, gt_mc);
    ASSERT_LT(gradient_error([&](const RealRaster& p) { return topology_loss_from_ma(p, gt_ma, gt_mc).value; },
                             pred_ma, t.grad_ma),
              1e-4)
        << "seed " << seed;
  }
}

TEST(SoftMarkers, SigmoidAroundThreshold) {
  const RealRaster ma(3, 1, {0.7, 0.0, 1.0});
  const RealRaster s = soft_markers(ma);
  EXPECT_DOUBLE_EQ(s[0], 0.5);
  EXPECT_LT(s[1], 1e-12);
  EXPECT_GT(s[2], 1.0 - 1e-6);
}

TEST(TotalLoss, AlphaZeroOneAndLinearity) {
  Rng rng(7);
  const Mask gt_fg = random_mask(rng, 8, 8), gt_mc = random_mask(rng, 8, 8);
  const RealRaster pred_fg = random_raster(rng, 8, 8, 0.05, 0.95);
  const RealRaster gt_ma = random_raster(rng, 8, 8, 0.0, 1.0);
  const RealRaster pred_ma = random_raster(rng, 8, 8, 0.0, 1.0);
  const RealRaster pred_mc = random_raster(rng, 8, 8, 0.0, 1.0);
  const LossInputs in{pred_fg, gt_fg, pred_ma, gt_ma, pred_mc, gt_mc};
  const double inst = ce_instance_loss(pred_fg, gt_fg).value;
  const double top = topology_loss(pred_ma, gt_ma, pred_mc, gt_mc).value;

  EXPECT_EQ(total_loss(in, {0.0}).value, inst);
  EXPECT_EQ(total_loss(in, {1.0}).value, inst + top);
  const TotalLoss one = total_loss(in, {1.0}), two = total_loss(in, {2.0});
  EXPECT_NEAR(two.value - inst, 2.0 * (one.value - inst), 1e-12);
  for (std::size_t i = 0; i < one.grad_ma.size(); ++i) {
    EXPECT_EQ(two.grad_ma[i], 2.0 * one.grad_ma[i]);
    EXPECT_EQ(two.grad_mc[i], 2.0 * one.grad_mc[i]);
    EXPECT_EQ(two.grad_fg[i], one.grad_fg[i]);
  }
  EXPECT_THROW(total_loss(in, {-1.0}), InvalidArgument);
}
