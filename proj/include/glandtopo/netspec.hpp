#ifndef GLANDTOPO_NETSPEC_HPP
#define GLANDTOPO_NETSPEC_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "glandtopo/error.hpp"

namespace glandtopo::net {

struct TensorShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

inline std::string to_string(const TensorShape& s) {
  return "(" + std::to_string(s.channels) + "," + std::to_string(s.height) + "," + std::to_string(s.width) + ")";
}

enum class LayerKind { Conv, MaxPool, MaxUnpool, DenseBlock, Softmax, Output };

inline std::string_view to_string(LayerKind k) {
  switch (k) {
    case LayerKind::Conv: return "conv";
    case LayerKind::MaxPool: return "maxpool";
    case LayerKind::MaxUnpool: return "maxunpool";
    case LayerKind::DenseBlock: return "dense";
    case LayerKind::Softmax: return "softmax";
    case LayerKind::Output: return "output";
  }
  return "?";
}

/// One layer. Conv and Output use `kernel`/`out_channels` ("same" padding, stride 1);
/// pools halve and unpools double the spatial size; a dense block stacks
/// `dense_layers` 3x3 convs of `growth` channels, each seeing all earlier outputs.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  int kernel = 0;
  int out_channels = 0;
  int dense_layers = 0;
  int growth = 0;
  int pool_index = -1;  ///< pools: own index; unpools: index of the pool they invert
};

struct NetGraph {
  std::vector<LayerSpec> encoder;
  std::vector<LayerSpec> inst;  ///< instance decoder, ends in a 2-channel output + softmax
  std::vector<LayerSpec> top;   ///< topology decoder, ends in a 1x1 conv to 1 channel
};

struct NetworkOptions {
  std::array<int, 5> encoder_channels{64, 128, 256, 512, 512};
  std::array<int, 5> decoder_channels{512, 512, 256, 128, 64};
  std::array<int, 5> dense_layers{8, 8, 8, 4, 4};
  int convs_per_encoder_block = 3;
  int growth = 32;
  /// Instance head kernel: 1 by default (2-channel 1x1 conv); 2 for a literal 2x2 kernel.
  int inst_head_kernel = 1;
};

namespace detail {

inline std::vector<LayerSpec> decoder(const std::string& prefix, const NetworkOptions& o) {
  std::vector<LayerSpec> layers;
  for (int b = 0; b < 5; ++b) {
    const std::string blk = prefix + ".up" + std::to_string(b + 1);
    layers.push_back({blk + ".unpool", LayerKind::MaxUnpool, 0, 0, 0, 0, 4 - b});
    layers.push_back({blk + ".dense", LayerKind::DenseBlock, 3, 0, o.dense_layers[static_cast<std::size_t>(b)],
                      o.growth, -1});
    layers.push_back({blk + ".conv", LayerKind::Conv, 3, o.decoder_channels[static_cast<std::size_t>(b)], 0, 0, -1});
  }
  return layers;
}

}  // namespace detail

/// Encoder of five (3 conv + maxpool) blocks shared by two identical dense
/// decoders that differ only in their heads.
inline NetGraph build_network(const NetworkOptions& o = {}) {
  if (o.inst_head_kernel != 1 && o.inst_head_kernel != 2) throw InvalidArgument("instance head kernel must be 1 or 2");
  NetGraph g;
  for (int b = 0; b < 5; ++b) {
    const std::string blk = "enc.down" + std::to_string(b + 1);
    for (int k = 0; k < o.convs_per_encoder_block; ++k) {
      g.encoder.push_back({blk + ".conv" + std::to_string(k + 1), LayerKind::Conv, 3,
                           o.encoder_channels[static_cast<std::size_t>(b)], 0, 0, -1});
    }
    g.encoder.push_back({blk + ".pool", LayerKind::MaxPool, 2, 0, 0, 0, b});
  }
  g.inst = detail::decoder("inst", o);
  g.inst.push_back({"inst.head", LayerKind::Output, o.inst_head_kernel, 2, 0, 0, -1});
  g.inst.push_back({"inst.softmax", LayerKind::Softmax, 0, 0, 0, 0, -1});
  g.top = detail::decoder("top", o);
  g.top.push_back({"top.head", LayerKind::Output, 1, 1, 0, 0, -1});
  return g;
}

struct LayerRow {
  std::string branch;
  LayerSpec layer;
  TensorShape in;
  TensorShape out;
  std::int64_t params = 0;
};

struct ShapeReport {
  TensorShape inst;
  TensorShape top;
  std::vector<LayerRow> rows;  ///< encoder rows, then inst rows, then top rows
};

inline std::int64_t conv_params(int kernel, int in_ch, int out_ch) {
  return std::int64_t{kernel} * kernel * in_ch * out_ch + out_ch;
}

/// Walks the graph from `input`. Height and width must be divisible by 2^5.
inline ShapeReport propagate_shapes(const NetGraph& g, const TensorShape& input) {
  if (input.channels <= 0 || input.height <= 0 || input.width <= 0) {
    throw InvalidArgument("input shape must be positive, got " + to_string(input));
  }
  int pools = 0;
  for (const auto& l : g.encoder) pools += l.kind == LayerKind::MaxPool;
  const int divisor = 1 << pools;
  if (input.height % divisor != 0 || input.width % divisor != 0) {
    throw DimensionError("input " + to_string(input) + ": height and width must be divisible by " +
                         std::to_string(divisor));
  }

  ShapeReport rep;
  std::vector<TensorShape> pool_inputs(static_cast<std::size_t>(pools));
  auto run = [&](const std::string& branch, const std::vector<LayerSpec>& layers, TensorShape s) {
    for (const LayerSpec& l : layers) {
      LayerRow row{branch, l, s, s, 0};
      switch (l.kind) {
        case LayerKind::Conv:
        case LayerKind::Output:
          row.out.channels = l.out_channels;
          row.params = conv_params(l.kernel, s.channels, l.out_channels);
          break;
        case LayerKind::MaxPool:
          pool_inputs[static_cast<std::size_t>(l.pool_index)] = s;
          row.out.height /= 2;
          row.out.width /= 2;
          break;
        case LayerKind::MaxUnpool: {
          row.out.height *= 2;
          row.out.width *= 2;
          const TensorShape& want = pool_inputs.at(static_cast<std::size_t>(l.pool_index));
          if (row.out.height != want.height || row.out.width != want.width) {
            throw DimensionError(l.name + ": unpool output " + to_string(row.out) +
                                 " does not match pool input " + to_string(want));
          }
          break;
        }
        case LayerKind::DenseBlock:
          for (int i = 0; i < l.dense_layers; ++i) {
            row.params += conv_params(l.kernel, s.channels + i * l.growth, l.growth);
          }
          row.out.channels = s.channels + l.dense_layers * l.growth;
          break;
        case LayerKind::Softmax:
          break;
      }
      rep.rows.push_back(row);
      s = row.out;
    }
    return s;
  };
  const TensorShape code = run("encoder", g.encoder, input);
  rep.inst = run("inst", g.inst, code);
  rep.top = run("top", g.top, code);
  return rep;
}

/// Total trainable parameters (conv weights + biases) for a given input channel count.
inline std::int64_t param_count(const NetGraph& g, int input_channels = 3) {
  // Parameter counts do not depend on spatial size; 32x32 is the smallest legal input.
  std::int64_t total = 0;
  for (const LayerRow& r : propagate_shapes(g, {input_channels, 32, 32}).rows) total += r.params;
  return total;
}

}  // namespace glandtopo::net

#endif  // GLANDTOPO_NETSPEC_HPP
