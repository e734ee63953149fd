// glandtopo: batch front-end for ground-truth generation, postprocessing,
// evaluation and the supporting utilities.
//
// Exit codes:
//   0  success
//   1  bad arguments or invalid parameter values
//   2  unreadable input (missing file or directory, I/O failure)
//   3  malformed PNG or F32R input
//   4  input files that should pair up by stem do not
//   5  raster or tensor dimensions do not match

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glandtopo/glandtopo.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace glandtopo;

namespace {

class MissingPair : public Error {
 public:
  using Error::Error;
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const MissingPair*>(&e)) return 4;
  if (dynamic_cast<const DimensionError*>(&e)) return 5;
  if (dynamic_cast<const FormatError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 2;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return 2;
  return 1;
}

/// Files in `dir` with extension `ext`, keyed by stem (sorted).
std::map<std::string, fs::path> files_by_stem(const fs::path& dir, const std::string& ext) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("'" + dir.string() + "' is not a readable directory");
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out[entry.path().stem().string()] = entry.path();
  }
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

std::string shape_str(std::size_t w, std::size_t h) { return std::to_string(w) + "x" + std::to_string(h); }

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidArgument("config '" + path + "': " + e.what());
  }
}

/// Overwrites `target` with config[key] when present.
template <typename T>
void override_from(const json& cfg, const char* key, T& target) {
  if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

StructuringElement parse_se(const std::string& s) {
  if (s == "square") return StructuringElement::Square3x3;
  if (s == "cross") return StructuringElement::Cross3x3;
  throw InvalidArgument("unknown structuring element '" + s + "' (expected square or cross)");
}

Normalization parse_normalization(const std::string& s) {
  if (s == "max") return Normalization::MaxNormalized;
  if (s == "max-minus-min") return Normalization::MaxMinusMin;
  throw InvalidArgument("unknown normalization '" + s + "' (expected max or max-minus-min)");
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct GenGtArgs {
  std::string labels_dir, out_dir, config;
  std::string metric = "ma", se = "square", normalization = "max";
  double tau_m = 0.7;
  std::size_t min_marker_area = 16;
  std::uint32_t contour_thickness = 1;
  std::size_t threads = 1;
};

int run_gen_gt(GenGtArgs a) {
  const json cfg = load_config(a.config);
  override_from(cfg, "metric", a.metric);
  override_from(cfg, "se", a.se);
  override_from(cfg, "normalization", a.normalization);
  override_from(cfg, "tau_m", a.tau_m);
  override_from(cfg, "min_marker_area", a.min_marker_area);
  override_from(cfg, "contour_thickness", a.contour_thickness);

  GroundTruthOptions opt;
  opt.metric = parse_metric(a.metric);
  opt.se = parse_se(a.se);
  opt.normalization = parse_normalization(a.normalization);
  opt.tau_m = a.tau_m;
  opt.min_marker_area = a.min_marker_area;
  opt.contour_thickness = a.contour_thickness;
  if (!(opt.tau_m > 0.0 && opt.tau_m < 1.0)) throw InvalidArgument("--tau-m must lie in (0, 1)");
  if (opt.contour_thickness < 1) throw InvalidArgument("--contour-thickness must be >= 1");

  const auto inputs = files_by_stem(a.labels_dir, ".png");
  const fs::path out(a.out_dir);
  for (const char* sub : {"ma", "skeleton", "contour", "markers", "fg"}) make_dir(out / sub);

  std::vector<std::pair<std::string, fs::path>> items(inputs.begin(), inputs.end());
  parallel_for(items.size(), a.threads, [&](std::size_t i) {
    const auto& [stem, path] = items[i];
    const LabelMap labels = read_label_png(path);
    const GroundTruthSet gt = make_ground_truth(labels, opt);
    RealRaster fg(labels.width(), labels.height());
    for (std::size_t k = 0; k < fg.size(); ++k) fg[k] = labels[k] ? 1.0 : 0.0;
    write_f32r(out / "ma" / (stem + ".f32r"), gt.distance);
    write_f32r(out / "fg" / (stem + ".f32r"), fg);
    write_mask_png(out / "skeleton" / (stem + ".png"), gt.skeleton);
    write_mask_png(out / "contour" / (stem + ".png"), gt.contour);
    write_label_png(out / "markers" / (stem + ".png"), gt.markers);
  });

  json echo;
  echo["subcommand"] = "gen-gt";
  echo["labels"] = a.labels_dir;
  echo["metric"] = a.metric;
  echo["se"] = a.se;
  echo["normalization"] = a.normalization;
  echo["tau_m"] = a.tau_m;
  echo["min_marker_area"] = a.min_marker_area;
  echo["contour_thickness"] = a.contour_thickness;
  echo["images"] = items.size();
  write_text(out / "run_config.json", echo.dump(2) + "\n");
  std::cout << "gen-gt: " << items.size() << " label maps -> " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PostprocessArgs {
  std::string prob_dir, ma_dir, out_dir, config;
  double tau_b = 0.5, tau_m = 0.7;
  std::size_t min_gland_area = 100, min_marker_area = 16;
  std::string se = "square";
  std::size_t threads = 1;
};

int run_postprocess(PostprocessArgs a) {
  const json cfg = load_config(a.config);
  override_from(cfg, "tau_b", a.tau_b);
  override_from(cfg, "tau_m", a.tau_m);
  override_from(cfg, "min_gland_area", a.min_gland_area);
  override_from(cfg, "min_marker_area", a.min_marker_area);
  override_from(cfg, "se", a.se);

  PostprocessConfig pc;
  pc.tau_b = a.tau_b;
  pc.tau_m = a.tau_m;
  pc.min_gland_area = a.min_gland_area;
  pc.min_marker_area = a.min_marker_area;
  pc.se = parse_se(a.se);
  pc.validate();

  const auto probs = files_by_stem(a.prob_dir, ".f32r");
  const auto mas = files_by_stem(a.ma_dir, ".f32r");
  for (const auto& [stem, _] : probs) {
    if (!mas.count(stem)) throw MissingPair("no MA map for '" + stem + "' in " + a.ma_dir);
  }
  for (const auto& [stem, _] : mas) {
    if (!probs.count(stem)) throw MissingPair("no probability map for '" + stem + "' in " + a.prob_dir);
  }
  const fs::path out(a.out_dir);
  make_dir(out);

  std::vector<std::string> stems;
  for (const auto& [stem, _] : probs) stems.push_back(stem);
  std::vector<Label> counts(stems.size());
  parallel_for(stems.size(), a.threads, [&](std::size_t i) {
    const std::string& stem = stems[i];
    const RealRaster prob = read_f32r(probs.at(stem));
    const RealRaster ma = read_f32r(mas.at(stem));
    if (!prob.same_shape(ma)) {
      throw DimensionError("'" + stem + "': probability map is " + shape_str(prob.width(), prob.height()) +
                           " but MA map is " + shape_str(ma.width(), ma.height()));
    }
    const LabelMap labels = postprocess_pipeline(prob, ma, pc);
    write_label_png(out / (stem + ".png"), labels);
    counts[i] = labels.n_labels;
  });

  json summary;
  summary["tau_b"] = pc.tau_b;
  summary["tau_m"] = pc.tau_m;
  summary["min_gland_area"] = pc.min_gland_area;
  summary["min_marker_area"] = pc.min_marker_area;
  summary["se"] = a.se;
  summary["images"] = json::array();
  std::size_t total = 0;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    summary["images"].push_back({{"stem", stems[i]}, {"objects", counts[i]}});
    total += counts[i];
  }
  summary["total_objects"] = total;
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << "postprocess: " << stems.size() << " images, " << total << " objects -> " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string pred_dir, gt_dir, report, config;
  std::string match_rule = "gt";
  std::size_t threads = 1;
};

int run_eval(EvalArgs a) {
  const json cfg = load_config(a.config);
  override_from(cfg, "match_rule", a.match_rule);
  MatchRule rule;
  if (a.match_rule == "gt") rule = MatchRule::GtOverlap;
  else if (a.match_rule == "iou") rule = MatchRule::IoU;
  else throw InvalidArgument("unknown match rule '" + a.match_rule + "' (expected gt or iou)");

  const auto preds = files_by_stem(a.pred_dir, ".png");
  const auto gts = files_by_stem(a.gt_dir, ".png");
  for (const auto& [stem, _] : gts) {
    if (!preds.count(stem)) throw MissingPair("no prediction for '" + stem + "' in " + a.pred_dir);
  }
  for (const auto& [stem, _] : preds) {
    if (!gts.count(stem)) throw MissingPair("no ground truth for '" + stem + "' in " + a.gt_dir);
  }
  std::vector<std::string> stems;
  for (const auto& [stem, _] : gts) stems.push_back(stem);
  std::vector<MetricsReport> reports(stems.size());
  parallel_for(stems.size(), a.threads, [&](std::size_t i) {
    const LabelMap pred = read_label_png(preds.at(stems[i]));
    const LabelMap gt = read_label_png(gts.at(stems[i]));
    if (!pred.pixels.same_shape(gt.pixels)) {
      throw DimensionError("'" + stems[i] + "': prediction is " + shape_str(pred.width(), pred.height()) +
                           " but ground truth is " + shape_str(gt.width(), gt.height()));
    }
    reports[i] = evaluate(pred, gt, rule);
  });

  std::ostringstream csv;
  csv << "image,f1,precision,recall,obj_dice,obj_h,tp,fp,fn\n";
  MetricsReport mean;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    const MetricsReport& r = reports[i];
    csv << stems[i] << ',' << fmt6(r.f1) << ',' << fmt6(r.precision) << ',' << fmt6(r.recall) << ','
        << fmt6(r.obj_dice) << ',' << fmt6(r.obj_hausdorff) << ',' << r.tp << ',' << r.fp << ',' << r.fn << '\n';
    mean.f1 += r.f1;
    mean.precision += r.precision;
    mean.recall += r.recall;
    mean.obj_dice += r.obj_dice;
    mean.obj_hausdorff += r.obj_hausdorff;
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
  }
  const double n = stems.empty() ? 1.0 : static_cast<double>(stems.size());
  json summary;
  summary["images"] = stems.size();
  summary["match_rule"] = a.match_rule;
  summary["mean"] = {{"f1", mean.f1 / n},
                     {"precision", mean.precision / n},
                     {"recall", mean.recall / n},
                     {"obj_dice", mean.obj_dice / n},
                     {"obj_h", mean.obj_hausdorff / n}};
  summary["totals"] = {{"tp", tp}, {"fp", fp}, {"fn", fn}};

  const fs::path report(a.report);
  if (report.has_parent_path()) make_dir(report.parent_path());
  write_text(fs::path(a.report + ".csv"), csv.str());
  write_text(fs::path(a.report + ".json"), summary.dump(2) + "\n");
  std::cout << "eval: " << stems.size() << " images, mean f1 " << fmt6(mean.f1 / n) << ", obj_dice "
            << fmt6(mean.obj_dice / n) << ", obj_h " << fmt6(mean.obj_hausdorff / n) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct NetcheckArgs {
  std::string input = "3,512,512";
  std::string json_path;
  int growth = 32;
  int inst_head_kernel = 1;
};

int run_netcheck(const NetcheckArgs& a) {
  net::TensorShape in;
  {
    std::vector<int> dims;
    std::stringstream ss(a.input);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        dims.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw InvalidArgument("--input expects C,H,W integers, got '" + a.input + "'");
      }
    }
    if (dims.size() != 3) throw InvalidArgument("--input expects C,H,W, got '" + a.input + "'");
    in = {dims[0], dims[1], dims[2]};
  }
  net::NetworkOptions opt;
  opt.growth = a.growth;
  opt.inst_head_kernel = a.inst_head_kernel;
  const net::NetGraph g = net::build_network(opt);
  const net::ShapeReport rep = net::propagate_shapes(g, in);

  std::int64_t total = 0;
  std::printf("%-8s %-22s %-10s %-18s %-18s %12s\n", "branch", "name", "kind", "in", "out", "params");
  json layers = json::array();
  for (const net::LayerRow& r : rep.rows) {
    total += r.params;
    std::printf("%-8s %-22s %-10s %-18s %-18s %12lld\n", r.branch.c_str(), r.layer.name.c_str(),
                std::string(net::to_string(r.layer.kind)).c_str(), net::to_string(r.in).c_str(),
                net::to_string(r.out).c_str(), static_cast<long long>(r.params));
    json row;
    row["branch"] = r.branch;
    row["name"] = r.layer.name;
    row["kind"] = std::string(net::to_string(r.layer.kind));
    row["kernel"] = r.layer.kernel;
    row["dense_layers"] = r.layer.dense_layers;
    row["growth"] = r.layer.growth;
    row["in"] = {r.in.channels, r.in.height, r.in.width};
    row["out"] = {r.out.channels, r.out.height, r.out.width};
    row["params"] = r.params;
    layers.push_back(row);
  }
  std::printf("inst output %s, top output %s, total params %lld\n", net::to_string(rep.inst).c_str(),
              net::to_string(rep.top).c_str(), static_cast<long long>(total));
  if (!a.json_path.empty()) {
    json doc;
    doc["input"] = {in.channels, in.height, in.width};
    doc["inst"] = {rep.inst.channels, rep.inst.height, rep.inst.width};
    doc["top"] = {rep.top.channels, rep.top.height, rep.top.width};
    doc["total_params"] = total;
    doc["layers"] = layers;
    write_text(a.json_path, doc.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir, config;
  std::string families = "disk,ellipse,blob";
  SynthCorpusSpec spec;
  std::size_t threads = 1;
};

int run_synth(SynthArgs a) {
  const json cfg = load_config(a.config);
  override_from(cfg, "count", a.spec.count);
  override_from(cfg, "width", a.spec.width);
  override_from(cfg, "height", a.spec.height);
  override_from(cfg, "min_glands", a.spec.min_glands);
  override_from(cfg, "max_glands", a.spec.max_glands);
  override_from(cfg, "min_radius", a.spec.min_radius);
  override_from(cfg, "max_radius", a.spec.max_radius);
  override_from(cfg, "families", a.families);
  override_from(cfg, "seed", a.spec.seed);
  a.spec.family_cycle.clear();
  std::stringstream ss(a.families);
  std::string tok;
  while (std::getline(ss, tok, ',')) a.spec.family_cycle.push_back(parse_family(tok));
  const json manifest = write_corpus(a.spec, a.out_dir, a.threads);
  std::cout << "synth: " << manifest["files"].size() << " images -> " << a.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string image, labels, out;
};

int run_render(const RenderArgs& a) {
  const RgbImage image = read_rgb_png(a.image);
  const LabelMap labels = read_label_png(a.labels);
  if (!image.same_shape(labels.pixels)) {
    throw DimensionError("image is " + shape_str(image.width(), image.height()) + " but labels are " +
                         shape_str(labels.width(), labels.height()));
  }
  write_rgb_png(a.out, render_overlay(image, labels));
  return 0;
}

// ---------------------------------------------------------------------------

struct LossEvalArgs {
  std::string pred_fg, pred_ma, pred_mc, gt_labels, gt_ma, gt_markers;
  double alpha = 1.0, tau_m = 0.7, steepness = 50.0;
  std::size_t min_marker_area = 16;
};

int run_loss_eval(const LossEvalArgs& a) {
  const RealRaster pred_fg = read_f32r(a.pred_fg);
  const RealRaster pred_ma = read_f32r(a.pred_ma);
  const LabelMap labels = read_label_png(a.gt_labels);
  auto check = [&](const auto& r, const std::string& what) {
    if (!r.same_shape(labels.pixels)) {
      throw DimensionError(what + " is " + shape_str(r.width(), r.height()) + " but ground truth is " +
                           shape_str(labels.width(), labels.height()));
    }
  };
  check(pred_fg, "--pred-fg");
  check(pred_ma, "--pred-ma");
  const RealRaster gt_ma = a.gt_ma.empty() ? ma_distance_map(labels) : read_f32r(a.gt_ma);
  check(gt_ma, "--gt-ma");
  const LabelMap markers =
      a.gt_markers.empty() ? marker_gt(gt_ma, a.tau_m, a.min_marker_area) : read_label_png(a.gt_markers);
  check(markers.pixels, "--gt-markers");
  const RealRaster pred_mc = a.pred_mc.empty() ? soft_markers(pred_ma, {a.tau_m, a.steepness}) : read_f32r(a.pred_mc);
  check(pred_mc, "--pred-mc");

  const Mask gt_fg = foreground(labels);
  const Mask gt_mc = foreground(markers);
  const TotalLoss t = total_loss({pred_fg, gt_fg, pred_ma, gt_ma, pred_mc, gt_mc}, {a.alpha});
  json out;
  out["l_inst"] = t.l_inst;
  out["l_ma"] = t.l_ma;
  out["l_mc"] = t.l_mc;
  out["l_top"] = t.l_top;
  out["total"] = t.value;
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glandtopo: topology-aware gland segmentation toolkit"};
  app.require_subcommand(1);

  GenGtArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-gt", "Derive MA/distance maps, skeletons, contours and markers from label maps");
  gen_cmd->add_option("--labels", gen.labels_dir, "Directory of 16-bit label PNGs")->required();
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--metric", gen.metric, "ma | chessboard | euclidean")->capture_default_str();
  gen_cmd->add_option("--se", gen.se, "Structuring element: square | cross")->capture_default_str();
  gen_cmd->add_option("--normalization", gen.normalization, "max | max-minus-min")->capture_default_str();
  gen_cmd->add_option("--tau-m", gen.tau_m, "Marker threshold")->capture_default_str();
  gen_cmd->add_option("--min-marker-area", gen.min_marker_area, "Minimum marker area (px)")->capture_default_str();
  gen_cmd->add_option("--contour-thickness", gen.contour_thickness, "Contour width (erosion steps)")->capture_default_str();
  gen_cmd->add_option("--threads", gen.threads, "Worker threads")->capture_default_str();
  gen_cmd->add_option("--config", gen.config, "JSON file whose keys override the flags");

  PostprocessArgs pp;
  auto* pp_cmd = app.add_subcommand("postprocess", "Watershed postprocessing of instance and MA predictions");
  pp_cmd->add_option("--prob", pp.prob_dir, "Directory of instance probability F32R maps")->required();
  pp_cmd->add_option("--ma", pp.ma_dir, "Directory of predicted MA F32R maps")->required();
  pp_cmd->add_option("--out", pp.out_dir, "Output directory")->required();
  pp_cmd->add_option("--tau-b", pp.tau_b, "Instance threshold")->capture_default_str();
  pp_cmd->add_option("--tau-m", pp.tau_m, "Marker threshold")->capture_default_str();
  pp_cmd->add_option("--min-gland-area", pp.min_gland_area, "Minimum gland area (px)")->capture_default_str();
  pp_cmd->add_option("--min-marker-area", pp.min_marker_area, "Minimum marker area (px)")->capture_default_str();
  pp_cmd->add_option("--se", pp.se, "square (8-connected) | cross (4-connected)")->capture_default_str();
  pp_cmd->add_option("--threads", pp.threads, "Worker threads")->capture_default_str();
  pp_cmd->add_option("--config", pp.config, "JSON file whose keys override the flags");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Object-level F1 / Dice / Hausdorff against ground truth");
  ev_cmd->add_option("--pred", ev.pred_dir, "Directory of predicted label PNGs")->required();
  ev_cmd->add_option("--gt", ev.gt_dir, "Directory of ground-truth label PNGs")->required();
  ev_cmd->add_option("--report", ev.report, "Report path prefix (writes .csv and .json)")->required();
  ev_cmd->add_option("--match-rule", ev.match_rule, "gt (>50% of GT) | iou (IoU > 0.5)")->capture_default_str();
  ev_cmd->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();
  ev_cmd->add_option("--config", ev.config, "JSON file whose keys override the flags");

  NetcheckArgs nc;
  auto* nc_cmd = app.add_subcommand("netcheck", "Print the network layer table with propagated shapes");
  nc_cmd->add_option("--input", nc.input, "Input shape C,H,W")->capture_default_str();
  nc_cmd->add_option("--json", nc.json_path, "Also write the table as JSON");
  nc_cmd->add_option("--growth", nc.growth, "Dense block growth rate")->capture_default_str();
  nc_cmd->add_option("--inst-head-kernel", nc.inst_head_kernel, "Instance head kernel size (1 or 2)")->capture_default_str();

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth", "Generate a synthetic gland corpus");
  sy_cmd->add_option("--out", sy.out_dir, "Corpus root")->required();
  sy_cmd->add_option("--count", sy.spec.count, "Number of images")->capture_default_str();
  sy_cmd->add_option("--width", sy.spec.width, "Image width")->capture_default_str();
  sy_cmd->add_option("--height", sy.spec.height, "Image height")->capture_default_str();
  sy_cmd->add_option("--min-glands", sy.spec.min_glands, "Minimum glands per image")->capture_default_str();
  sy_cmd->add_option("--max-glands", sy.spec.max_glands, "Maximum glands per image")->capture_default_str();
  sy_cmd->add_option("--min-radius", sy.spec.min_radius, "Minimum gland radius")->capture_default_str();
  sy_cmd->add_option("--max-radius", sy.spec.max_radius, "Maximum gland radius")->capture_default_str();
  sy_cmd->add_option("--families", sy.families, "Family cycle, e.g. disk,ellipse,blob,fused-pair,ring")->capture_default_str();
  sy_cmd->add_option("--seed", sy.spec.seed, "Random seed")->capture_default_str();
  sy_cmd->add_option("--threads", sy.threads, "Worker threads")->capture_default_str();
  sy_cmd->add_option("--config", sy.config, "JSON file whose keys override the flags");

  RenderArgs rd;
  auto* rd_cmd = app.add_subcommand("render", "Overlay a label map on an image");
  rd_cmd->add_option("--image", rd.image, "Input image PNG")->required();
  rd_cmd->add_option("--labels", rd.labels, "Label map PNG")->required();
  rd_cmd->add_option("--out", rd.out, "Output RGB PNG")->required();

  LossEvalArgs le;
  auto* le_cmd = app.add_subcommand("loss-eval", "Evaluate the training losses on prediction rasters");
  le_cmd->add_option("--pred-fg", le.pred_fg, "Foreground probability F32R")->required();
  le_cmd->add_option("--pred-ma", le.pred_ma, "Predicted MA map F32R")->required();
  le_cmd->add_option("--gt-labels", le.gt_labels, "Ground-truth label PNG")->required();
  le_cmd->add_option("--pred-mc", le.pred_mc, "Predicted marker map F32R (default: soft threshold of --pred-ma)");
  le_cmd->add_option("--gt-ma", le.gt_ma, "Ground-truth MA map F32R (default: derived from labels)");
  le_cmd->add_option("--gt-markers", le.gt_markers, "Ground-truth marker PNG (default: derived from MA)");
  le_cmd->add_option("--alpha", le.alpha, "Topology loss weight")->capture_default_str();
  le_cmd->add_option("--tau-m", le.tau_m, "Marker threshold")->capture_default_str();
  le_cmd->add_option("--steepness", le.steepness, "Soft marker sigmoid steepness")->capture_default_str();
  le_cmd->add_option("--min-marker-area", le.min_marker_area, "Minimum marker area (px)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen_cmd) return run_gen_gt(gen);
    if (*pp_cmd) return run_postprocess(pp);
    if (*ev_cmd) return run_eval(ev);
    if (*nc_cmd) return run_netcheck(nc);
    if (*sy_cmd) return run_synth(sy);
    if (*rd_cmd) return run_render(rd);
    if (*le_cmd) return run_loss_eval(le);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}
