#ifndef GLANDTOPO_PATCHING_HPP
#define GLANDTOPO_PATCHING_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "glandtopo/raster.hpp"

namespace glandtopo {

/// Square tiling of an image. Offsets along each axis start at 0, advance by
/// `stride`, and the last one is clamped so the final patch ends flush with the edge.
struct PatchGrid {
  std::size_t patch_size = 0;
  std::size_t stride = 0;
  std::vector<std::size_t> row_offsets;
  std::vector<std::size_t> col_offsets;

  std::size_t count() const noexcept { return row_offsets.size() * col_offsets.size(); }
};

namespace detail {

inline std::vector<std::size_t> axis_offsets(std::size_t extent, std::size_t patch, std::size_t stride) {
  std::vector<std::size_t> offs{0};
  if (patch >= extent) return offs;
  while (offs.back() + patch < extent) offs.push_back(std::min(offs.back() + stride, extent - patch));
  return offs;
}

/// Mirror index into [0, n) without repeating the edge sample.
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * n - 2);
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<std::ptrdiff_t>(n) ? i : period - i);
}

}  // namespace detail

/// Grid for a width x height image. A stride of 0 selects patch_size / 2.
inline PatchGrid make_patch_grid(std::size_t width, std::size_t height, std::size_t patch_size,
                                 std::size_t stride = 0) {
  if (patch_size == 0) throw InvalidArgument("patch size must be positive");
  if (stride == 0) stride = std::max<std::size_t>(1, patch_size / 2);
  if (stride > patch_size) throw InvalidArgument("stride must not exceed the patch size");
  return {patch_size, stride, detail::axis_offsets(height, patch_size, stride),
          detail::axis_offsets(width, patch_size, stride)};
}

template <typename T>
struct Patch {
  std::size_t row = 0;
  std::size_t col = 0;
  Raster<T> data;
};

/// Cuts `image` along `grid`, row-major over offsets. Images smaller than the patch
/// are reflect-padded on the bottom/right so every patch has the full size.
template <typename T>
std::vector<Patch<T>> extract_patches(const Raster<T>& image, const PatchGrid& grid) {
  std::vector<Patch<T>> patches;
  patches.reserve(grid.count());
  const std::size_t p = grid.patch_size;
  for (std::size_t r0 : grid.row_offsets) {
    for (std::size_t c0 : grid.col_offsets) {
      Patch<T> patch{r0, c0, Raster<T>(p, p)};
      for (std::size_t r = 0; r < p; ++r) {
        const std::size_t sr = detail::reflect_index(static_cast<std::ptrdiff_t>(r0 + r), image.height());
        for (std::size_t c = 0; c < p; ++c) {
          const std::size_t sc = detail::reflect_index(static_cast<std::ptrdiff_t>(c0 + c), image.width());
          patch.data(r, c) = image(sr, sc);
        }
      }
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

/// Merges patches into a width x height map by averaging every pixel over the
/// patches covering it. Patch pixels beyond the output are ignored.
template <typename T>
RealRaster stitch(const std::vector<Patch<T>>& patches, std::size_t width, std::size_t height) {
  RealRaster sum(width, height);
  Raster<std::uint32_t> hits(width, height);
  for (const Patch<T>& p : patches) {
    const std::size_t rows = std::min(p.data.height(), height > p.row ? height - p.row : 0);
    const std::size_t cols = std::min(p.data.width(), width > p.col ? width - p.col : 0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        sum(p.row + r, p.col + c) += static_cast<double>(p.data(r, c));
        ++hits(p.row + r, p.col + c);
      }
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (hits[i] == 0) {
      throw InvalidArgument("stitch: pixel (" + std::to_string(i / width) + ", " +
                            std::to_string(i % width) + ") is not covered by any patch");
    }
    sum[i] /= hits[i];
  }
  return sum;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_PATCHING_HPP
