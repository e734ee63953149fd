#include <gtest/gtest.h>

#include "glandtopo/netspec.hpp"

using namespace glandtopo;
using namespace glandtopo::net;

TEST(NetSpec, ChannelCountsPerBlock) {
  const NetGraph g = build_network();
  const ShapeReport rep = propagate_shapes(g, {3, 512, 512});
  // Channel count entering each pool is the block's output.
  std::vector<int> enc;
  for (const LayerRow& r : rep.rows)
    if (r.branch == "encoder" && r.layer.kind == LayerKind::MaxPool) enc.push_back(r.in.channels);
  EXPECT_EQ(enc, (std::vector<int>{64, 128, 256, 512, 512}));
  EXPECT_EQ(enc[2], 256);

  std::vector<int> dec;
  for (const LayerRow& r : rep.rows) {
    // Each decoder block ends in the conv that follows its dense block.
    if (r.branch == "inst" && r.layer.kind == LayerKind::Conv) dec.push_back(r.out.channels);
  }
  EXPECT_EQ(dec, (std::vector<int>{512, 512, 256, 128, 64}));
}

TEST(NetSpec, TwoHeads) {
  const NetGraph g = build_network();
  ASSERT_FALSE(g.inst.empty());
  ASSERT_FALSE(g.top.empty());
  EXPECT_EQ(g.inst.back().kind, LayerKind::Softmax);
  EXPECT_EQ(g.top.back().kind, LayerKind::Output);
  EXPECT_EQ(g.top.back().kernel, 1);
  EXPECT_EQ(g.top.back().out_channels, 1);
}

TEST(NetSpec, OutputShapes) {
  const NetGraph g = build_network();
  for (int s : {512, 768, 32, 480}) {
    const ShapeReport rep = propagate_shapes(g, {3, s, s});
    EXPECT_EQ(rep.inst, (TensorShape{2, s, s}));
    EXPECT_EQ(rep.top, (TensorShape{1, s, s}));
  }
  const ShapeReport rect = propagate_shapes(g, {3, 256, 640});
  EXPECT_EQ(rect.inst, (TensorShape{2, 256, 640}));
}

TEST(NetSpec, IndivisibleInputRejectedWithDivisor) {
  const NetGraph g = build_network();
  try {
    propagate_shapes(g, {3, 500, 500});
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("32"), std::string::npos);
  }
  EXPECT_THROW(propagate_shapes(g, {3, 512, 500}), DimensionError);
  EXPECT_THROW(propagate_shapes(g, {0, 512, 512}), InvalidArgument);
}

TEST(NetSpec, SingleConvParams) {
  EXPECT_EQ(conv_params(3, 3, 64), 1792);
  NetGraph g;
  g.encoder.push_back({"c", LayerKind::Conv, 3, 64});
  EXPECT_EQ(param_count(g, 3), 1792);
}

TEST(NetSpec, ParamCountIndependentOfSpatialSize) {
  const NetGraph g = build_network();
  auto sum = [&](int s) {
    std::int64_t t = 0;
    for (const LayerRow& r : propagate_shapes(g, {3, s, s}).rows) t += r.params;
    return t;
  };
  EXPECT_EQ(sum(512), sum(768));
  EXPECT_EQ(sum(512), param_count(g));
}

TEST(NetSpec, ParamCountRecomputedFromLayerTable) {
  const NetGraph g = build_network();
  const ShapeReport rep = propagate_shapes(g, {3, 512, 512});
  std::int64_t total = 0;
  for (const LayerRow& r : rep.rows) {
    const std::int64_t k2 = std::int64_t{r.layer.kernel} * r.layer.kernel;
    switch (r.layer.kind) {
      case LayerKind::Conv:
      case LayerKind::Output:
        total += k2 * r.in.channels * r.out.channels + r.out.channels;
        break;
      case LayerKind::DenseBlock:
        for (int i = 0; i < r.layer.dense_layers; ++i) {
          const std::int64_t in = r.in.channels + std::int64_t{i} * r.layer.growth;
          total += k2 * in * r.layer.growth + r.layer.growth;
        }
        EXPECT_EQ(r.out.channels, r.in.channels + r.layer.dense_layers * r.layer.growth);
        break;
      default:
        EXPECT_EQ(r.out.channels, r.in.channels);
        break;
    }
  }
  EXPECT_EQ(total, param_count(g));

  // Encoder by hand: three 3x3 convs per block.
  std::int64_t enc = 0;
  int in = 3;
  for (int ch : {64, 128, 256, 512, 512}) {
    enc += 9LL * in * ch + ch;
    enc += 2 * (9LL * ch * ch + ch);
    in = ch;
  }
  std::int64_t enc_rows = 0;
  for (const LayerRow& r : rep.rows)
    if (r.branch == "encoder") enc_rows += r.params;
  EXPECT_EQ(enc_rows, enc);
}

TEST(NetSpec, UnpoolInvertsPoolAndBranchesMirror) {
  const NetGraph g = build_network();
  const ShapeReport rep = propagate_shapes(g, {3, 768, 512});
  std::vector<const LayerRow*> inst, top;
  for (const LayerRow& r : rep.rows) {
    if (r.branch == "inst") inst.push_back(&r);
    if (r.branch == "top") top.push_back(&r);
  }
  // Identical up to the heads: inst ends with output + softmax, top with output.
  ASSERT_EQ(inst.size(), top.size() + 1);
  for (std::size_t i = 0; i + 1 < top.size(); ++i) {
    EXPECT_EQ(inst[i]->layer.kind, top[i]->layer.kind);
    EXPECT_EQ(inst[i]->out, top[i]->out);
    EXPECT_EQ(inst[i]->params, top[i]->params);
  }
  for (const LayerRow& r : rep.rows) {
    if (r.layer.kind == LayerKind::MaxUnpool) {
      EXPECT_EQ(r.out.height, r.in.height * 2);
      EXPECT_EQ(r.out.width, r.in.width * 2);
    }
  }
}

TEST(NetSpec, LiteralTwoByTwoHeadOption) {
  NetworkOptions opt;
  opt.inst_head_kernel = 2;
  const NetGraph g = build_network(opt);
  const ShapeReport rep = propagate_shapes(g, {3, 512, 512});
  EXPECT_EQ(rep.inst, (TensorShape{2, 512, 512}));
  EXPECT_EQ(param_count(g) - param_count(build_network()), 3LL * 64 * 2);
}
