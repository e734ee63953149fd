#ifndef GLANDTOPO_AUGMENT_HPP
#define GLANDTOPO_AUGMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "glandtopo/patching.hpp"
#include "glandtopo/raster.hpp"
#include "glandtopo/rng.hpp"

namespace glandtopo {

enum class AugmentKind { FlipH, FlipV, Rot90, Rot180, Rot270, GaussianBlur, MedianBlur };

struct Augmentation {
  AugmentKind kind = AugmentKind::FlipH;
  double sigma = 1.0;  ///< GaussianBlur only, in [0.5, 1.5]
  int kernel = 3;      ///< MedianBlur only, 3 or 5

  void validate() const {
    if (kind == AugmentKind::GaussianBlur && !(sigma >= 0.5 && sigma <= 1.5)) {
      throw InvalidArgument("gaussian blur sigma must lie in [0.5, 1.5]");
    }
    if (kind == AugmentKind::MedianBlur && kernel != 3 && kernel != 5) {
      throw InvalidArgument("median blur kernel must be 3 or 5");
    }
  }
  bool geometric() const { return kind != AugmentKind::GaussianBlur && kind != AugmentKind::MedianBlur; }
};

/// Mirror left-right.
template <typename T>
Raster<T> flip_h(const Raster<T>& in) {
  Raster<T> out(in.width(), in.height());
  for (std::size_t r = 0; r < in.height(); ++r)
    for (std::size_t c = 0; c < in.width(); ++c) out(r, in.width() - 1 - c) = in(r, c);
  return out;
}

/// Mirror top-bottom.
template <typename T>
Raster<T> flip_v(const Raster<T>& in) {
  Raster<T> out(in.width(), in.height());
  for (std::size_t r = 0; r < in.height(); ++r)
    for (std::size_t c = 0; c < in.width(); ++c) out(in.height() - 1 - r, c) = in(r, c);
  return out;
}

/// Quarter turn clockwise.
template <typename T>
Raster<T> rotate90(const Raster<T>& in) {
  Raster<T> out(in.height(), in.width());
  for (std::size_t r = 0; r < in.height(); ++r)
    for (std::size_t c = 0; c < in.width(); ++c) out(c, in.height() - 1 - r) = in(r, c);
  return out;
}

template <typename T>
T round_to(double v) {
  if constexpr (std::is_integral_v<T>) {
    return static_cast<T>(std::clamp(std::lround(v), static_cast<long>(std::numeric_limits<T>::min()),
                                     static_cast<long>(std::numeric_limits<T>::max())));
  } else {
    return static_cast<T>(v);
  }
}

/// Separable Gaussian blur, kernel radius ceil(3 sigma), mirrored borders.
template <typename T>
Raster<T> gaussian_blur(const Raster<T>& in, double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    norm += kernel[static_cast<std::size_t>(i + radius)];
  }
  for (double& k : kernel) k /= norm;

  RealRaster tmp(in.width(), in.height());
  for (std::size_t r = 0; r < in.height(); ++r) {
    for (std::size_t c = 0; c < in.width(); ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        const auto sc = detail::reflect_index(static_cast<std::ptrdiff_t>(c) + i, in.width());
        acc += kernel[static_cast<std::size_t>(i + radius)] * static_cast<double>(in(r, sc));
      }
      tmp(r, c) = acc;
    }
  }
  Raster<T> out(in.width(), in.height());
  for (std::size_t r = 0; r < in.height(); ++r) {
    for (std::size_t c = 0; c < in.width(); ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        const auto sr = detail::reflect_index(static_cast<std::ptrdiff_t>(r) + i, in.height());
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp(sr, c);
      }
      out(r, c) = round_to<T>(acc);
    }
  }
  return out;
}

/// k x k median filter with mirrored borders.
template <typename T>
Raster<T> median_blur(const Raster<T>& in, int k) {
  const std::ptrdiff_t half = k / 2;
  Raster<T> out(in.width(), in.height());
  std::vector<T> window(static_cast<std::size_t>(k * k));
  for (std::size_t r = 0; r < in.height(); ++r) {
    for (std::size_t c = 0; c < in.width(); ++c) {
      std::size_t n = 0;
      for (std::ptrdiff_t dr = -half; dr <= half; ++dr) {
        const auto sr = detail::reflect_index(static_cast<std::ptrdiff_t>(r) + dr, in.height());
        for (std::ptrdiff_t dc = -half; dc <= half; ++dc) {
          window[n++] = in(sr, detail::reflect_index(static_cast<std::ptrdiff_t>(c) + dc, in.width()));
        }
      }
      std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(n / 2), window.end());
      out(r, c) = window[n / 2];
    }
  }
  return out;
}

/// Applies one augmentation. Geometric ops transform image and labels alike;
/// blurs touch the image only.
template <typename T, typename L>
std::pair<Raster<T>, Raster<L>> apply_augmentation(const Raster<T>& image, const Raster<L>& labels,
                                                   const Augmentation& aug) {
  aug.validate();
  require_same_shape(image, labels, "augment");
  switch (aug.kind) {
    case AugmentKind::FlipH: return {flip_h(image), flip_h(labels)};
    case AugmentKind::FlipV: return {flip_v(image), flip_v(labels)};
    case AugmentKind::Rot90: return {rotate90(image), rotate90(labels)};
    case AugmentKind::Rot180: return {rotate90(rotate90(image)), rotate90(rotate90(labels))};
    case AugmentKind::Rot270:
      return {rotate90(rotate90(rotate90(image))), rotate90(rotate90(rotate90(labels)))};
    case AugmentKind::GaussianBlur: return {gaussian_blur(image, aug.sigma), labels};
    case AugmentKind::MedianBlur: return {median_blur(image, aug.kernel), labels};
  }
  throw InvalidArgument("unknown augmentation");
}

/// Random augmentation: each entry of `spec`, in order, fires with probability 1/2.
/// The same seed always draws the same choices.
template <typename T, typename L>
std::pair<Raster<T>, Raster<L>> augment(const Raster<T>& image, const Raster<L>& labels,
                                        const std::vector<Augmentation>& spec, std::uint64_t seed) {
  Rng rng(seed);
  std::pair<Raster<T>, Raster<L>> cur{image, labels};
  for (const Augmentation& aug : spec) {
    if (rng.coin()) cur = apply_augmentation(cur.first, cur.second, aug);
  }
  return cur;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_AUGMENT_HPP
