#ifndef GLANDTOPO_WATERSHED_HPP
#define GLANDTOPO_WATERSHED_HPP

#include <cstdint>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "glandtopo/morphology.hpp"
#include "glandtopo/raster.hpp"

namespace glandtopo {

/// Marker-controlled watershed by priority flood.
///
/// Marker pixels are enqueued in raster order. Popping a pixel labels every
/// unlabelled in-region neighbour with its own label and enqueues it at that
/// neighbour's elevation. Queue order is (elevation, insertion number), so equal
/// elevations flood first-in first-out and the result is fully deterministic.
/// Region pixels no marker can reach stay 0. The returned labels are canonical.
inline LabelMap watershed(const Mask& region, const RealRaster& elevation, const LabelMap& markers,
                          Connectivity conn = Connectivity::Eight) {
  require_same_shape(region, elevation, "watershed: region/elevation");
  require_same_shape(region, markers, "watershed: region/markers");
  require_finite(elevation, "watershed elevation");

  using Entry = std::tuple<double, std::uint64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::uint64_t seq = 0;
  LabelImage out(region.width(), region.height());

  for (std::size_t i = 0; i < markers.pixels.size(); ++i) {
    const Label m = markers[i];
    if (m == 0) continue;
    if (region[i] == 0) {
      throw InvalidArgument("watershed: marker " + std::to_string(m) + " has pixel (" +
                            std::to_string(i / region.width()) + ", " +
                            std::to_string(i % region.width()) + ") outside the region");
    }
    out[i] = m;
    queue.emplace(elevation[i], seq++, i);
  }

  const auto nbrs = neighbors(conn);
  const auto w = static_cast<std::ptrdiff_t>(region.width());
  while (!queue.empty()) {
    const std::size_t p = std::get<2>(queue.top());
    queue.pop();
    const auto pr = static_cast<std::ptrdiff_t>(p) / w, pc = static_cast<std::ptrdiff_t>(p) % w;
    for (const Offset& o : nbrs) {
      const std::ptrdiff_t qr = pr + o.drow, qc = pc + o.dcol;
      if (!region.contains(qr, qc)) continue;
      const auto q = static_cast<std::size_t>(qr * w + qc);
      if (region[q] == 0 || out[q] != 0) continue;
      out[q] = out[p];
      queue.emplace(elevation[q], seq++, q);
    }
  }
  return canonicalize(out);
}

}  // namespace glandtopo

#endif  // GLANDTOPO_WATERSHED_HPP
