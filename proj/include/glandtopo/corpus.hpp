#ifndef GLANDTOPO_CORPUS_HPP
#define GLANDTOPO_CORPUS_HPP

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "glandtopo/io.hpp"
#include "glandtopo/parallel.hpp"
#include "glandtopo/synth.hpp"
#include "glandtopo/topo_gt.hpp"
#include "json.hpp"

namespace glandtopo {

inline std::string corpus_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%04zu", index);
  return buf;
}

inline nlohmann::ordered_json to_json(const SynthCorpusSpec& spec) {
  nlohmann::ordered_json j;
  j["count"] = spec.count;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["min_glands"] = spec.min_glands;
  j["max_glands"] = spec.max_glands;
  j["min_radius"] = spec.min_radius;
  j["max_radius"] = spec.max_radius;
  j["family_cycle"] = nlohmann::ordered_json::array();
  for (ShapeFamily f : spec.family_cycle) j["family_cycle"].push_back(std::string(to_string(f)));
  j["seed"] = spec.seed;
  return j;
}

/// Writes the corpus below `root`:
///   images/<stem>.png   8-bit grayscale texture
///   labels/<stem>.png   16-bit ground-truth label map
///   ma/<stem>.f32r      MA distance map derived from the labels
///   markers/<stem>.png  16-bit marker map derived from the MA map
///   corpus.json         spec, seed and file list
/// Output bytes depend only on `spec`, never on `threads`.
inline nlohmann::ordered_json write_corpus(const SynthCorpusSpec& spec, const std::filesystem::path& root,
                                           std::size_t threads = 1, const GroundTruthOptions& gt_opt = {}) {
  spec.validate();
  namespace fs = std::filesystem;
  for (const char* sub : {"images", "labels", "ma", "markers"}) {
    std::error_code ec;
    fs::create_directories(root / sub, ec);
    if (ec) throw IoError("cannot create '" + (root / sub).string() + "': " + ec.message());
  }
  std::vector<nlohmann::ordered_json> entries(spec.count);
  parallel_for(spec.count, threads, [&](std::size_t i) {
    const std::string stem = corpus_stem(i);
    const SynthSample s = synth_sample(spec, i);
    const RealRaster ma = distance_map(s.labels, gt_opt.metric, gt_opt.se, gt_opt.normalization);
    const LabelMap markers = marker_gt(ma, gt_opt.tau_m, gt_opt.min_marker_area);
    write_gray_png(root / "images" / (stem + ".png"), s.image);
    write_label_png(root / "labels" / (stem + ".png"), s.labels);
    write_f32r(root / "ma" / (stem + ".f32r"), ma);
    write_label_png(root / "markers" / (stem + ".png"), markers);
    nlohmann::ordered_json e;
    e["stem"] = stem;
    e["family"] = std::string(to_string(s.family));
    e["n_labels"] = s.labels.n_labels;
    e["image"] = "images/" + stem + ".png";
    e["labels"] = "labels/" + stem + ".png";
    e["ma"] = "ma/" + stem + ".f32r";
    e["markers"] = "markers/" + stem + ".png";
    entries[i] = std::move(e);
  });
  nlohmann::ordered_json manifest;
  manifest["spec"] = to_json(spec);
  manifest["seed"] = spec.seed;
  manifest["files"] = entries;
  write_text(root / "corpus.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace glandtopo

#endif  // GLANDTOPO_CORPUS_HPP
