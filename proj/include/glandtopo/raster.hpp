#ifndef GLANDTOPO_RASTER_HPP
#define GLANDTOPO_RASTER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "glandtopo/error.hpp"

namespace glandtopo {

/// Dense row-major 2D grid. Pixel (row, col) lives at values()[row * width + col].
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), values_(width * height, fill) {}
  Raster(std::size_t width, std::size_t height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    if (values_.size() != width_ * height_) {
      throw DimensionError("raster value count " + std::to_string(values_.size()) +
                           " does not match " + std::to_string(width_) + "x" +
                           std::to_string(height_));
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(std::size_t row, std::size_t col) noexcept { return values_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const noexcept {
    return values_[row * width_ + col];
  }
  T& operator[](std::size_t index) noexcept { return values_[index]; }
  const T& operator[](std::size_t index) const noexcept { return values_[index]; }

  /// Bounds-checked access with signed coordinates; `outside` is returned off-grid.
  T get_or(std::ptrdiff_t row, std::ptrdiff_t col, T outside) const noexcept {
    if (row < 0 || col < 0 || row >= static_cast<std::ptrdiff_t>(height_) ||
        col >= static_cast<std::ptrdiff_t>(width_)) {
      return outside;
    }
    return values_[static_cast<std::size_t>(row) * width_ + static_cast<std::size_t>(col)];
  }

  bool contains(std::ptrdiff_t row, std::ptrdiff_t col) const noexcept {
    return row >= 0 && col >= 0 && row < static_cast<std::ptrdiff_t>(height_) &&
           col < static_cast<std::ptrdiff_t>(width_);
  }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  void fill(T value) { std::fill(values_.begin(), values_.end(), value); }

  bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster& a, const Raster& b) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> values_;
};

/// Binary raster, 0 = off and 1 = on.
using Mask = Raster<std::uint8_t>;
using RealRaster = Raster<double>;
using Label = std::uint32_t;
using LabelImage = Raster<Label>;

/// Instance map: 0 = background, 1..n_labels = object ids. Produced canonical by
/// every library operation (labels numbered in raster order of first appearance).
struct LabelMap {
  LabelImage pixels;
  Label n_labels = 0;

  std::size_t width() const noexcept { return pixels.width(); }
  std::size_t height() const noexcept { return pixels.height(); }
  Label operator()(std::size_t row, std::size_t col) const noexcept { return pixels(row, col); }
  Label operator[](std::size_t index) const noexcept { return pixels[index]; }

  friend bool operator==(const LabelMap& a, const LabelMap& b) = default;
};

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.width()) +
                         "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                         "x" + std::to_string(b.height()));
  }
}

/// Renumbers labels to 1..n in raster order of first appearance. Zero stays zero.
inline LabelMap canonicalize(const LabelImage& image) {
  LabelMap out{LabelImage(image.width(), image.height()), 0};
  std::unordered_map<Label, Label> remap;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const Label v = image[i];
    if (v == 0) continue;
    auto [it, inserted] = remap.try_emplace(v, out.n_labels + 1);
    if (inserted) ++out.n_labels;
    out.pixels[i] = it->second;
  }
  return out;
}

inline Mask foreground(const LabelMap& labels) {
  Mask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = labels[i] != 0 ? 1 : 0;
  return out;
}

inline std::size_t count_on(const Mask& mask) {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
}

/// Throws if any value is NaN or infinite.
inline void require_finite(const RealRaster& raster, const char* what) {
  for (double v : raster) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + ": non-finite value");
  }
}

/// Per-label pixel counts indexed by label (entry 0 counts background).
inline std::vector<std::size_t> label_areas(const LabelMap& labels) {
  std::vector<std::size_t> areas(static_cast<std::size_t>(labels.n_labels) + 1, 0);
  for (Label v : labels.pixels) ++areas[v];
  return areas;
}

/// Axis-aligned inclusive bounding box of one object.
struct Box {
  std::size_t row0 = 0, col0 = 0, row1 = 0, col1 = 0;
  std::size_t height() const noexcept { return row1 - row0 + 1; }
  std::size_t width() const noexcept { return col1 - col0 + 1; }
};

/// Bounding boxes indexed by label - 1.
inline std::vector<Box> label_boxes(const LabelMap& labels) {
  std::vector<Box> boxes(labels.n_labels);
  std::vector<bool> seen(labels.n_labels, false);
  for (std::size_t r = 0; r < labels.height(); ++r) {
    for (std::size_t c = 0; c < labels.width(); ++c) {
      const Label v = labels(r, c);
      if (v == 0) continue;
      Box& b = boxes[v - 1];
      if (!seen[v - 1]) {
        b = {r, c, r, c};
        seen[v - 1] = true;
        continue;
      }
      b.row0 = std::min(b.row0, r);
      b.row1 = std::max(b.row1, r);
      b.col0 = std::min(b.col0, c);
      b.col1 = std::max(b.col1, c);
    }
  }
  return boxes;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_RASTER_HPP
