#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "glandtopo/glandtopo.hpp"
#include "json.hpp"

using namespace glandtopo;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("glandtopo_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + GLANDTOPO_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp_text(out), slurp_text(err)};
  }

  fs::path path(const std::string& rel) const { return dir_ / rel; }
  std::string p(const std::string& rel) const { return "\"" + (dir_ / rel).string() + "\""; }

  void small_corpus(const std::string& families = "disk,fused-pair,ellipse,blob") const {
    ASSERT_EQ(run("synth --out " + p("corpus") + " --count 6 --width 128 --height 128 --min-radius 10 "
                  "--max-radius 16 --min-glands 2 --max-glands 4 --families " + families).code,
              0);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, IdentityPipelineScoresPerfectly) {
  small_corpus();
  ASSERT_EQ(run("gen-gt --labels " + p("corpus/labels") + " --out " + p("gt")).code, 0);
  for (const char* sub : {"ma", "skeleton", "contour", "markers", "fg"}) {
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(path("gt") / sub)) ++n;
    EXPECT_EQ(n, 6u) << sub;
  }
  EXPECT_TRUE(fs::exists(path("gt/run_config.json")));
  ASSERT_EQ(run("postprocess --prob " + p("gt/fg") + " --ma " + p("gt/ma") + " --out " + p("pred")).code, 0);
  const auto summary = nlohmann::json::parse(slurp_text(path("pred/summary.json")));
  EXPECT_EQ(summary["images"].size(), 6u);
  ASSERT_EQ(run("eval --pred " + p("pred") + " --gt " + p("corpus/labels") + " --report " + p("rep/score")).code, 0);
  const auto rep = nlohmann::json::parse(slurp_text(path("rep/score.json")));
  EXPECT_EQ(rep["mean"]["f1"].get<double>(), 1.0);
  EXPECT_GE(rep["mean"]["obj_dice"].get<double>(), 0.99);
  EXPECT_LE(rep["mean"]["obj_h"].get<double>(), 2.0);
  const std::string csv = slurp_text(path("rep/score.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "image,f1,precision,recall,obj_dice,obj_h,tp,fp,fn");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);

  // Disjoint glands come back exactly; fused pairs may move the split line.
  const auto manifest = nlohmann::json::parse(slurp_text(path("corpus/corpus.json")));
  std::map<std::string, std::string> family;
  for (const auto& f : manifest["files"]) family[f["stem"]] = f["family"];
  std::istringstream rows(csv.substr(csv.find('\n') + 1));
  for (std::string line; std::getline(rows, line);) {
    const std::string stem = line.substr(0, line.find(','));
    if (family.at(stem) == "fused-pair") continue;
    EXPECT_NE(line.find(",1.000000,0.000000,"), std::string::npos) << line;
  }
}

TEST_F(Cli, GenGtChessboardMetric) {
  small_corpus("disk");
  ASSERT_EQ(run("gen-gt --labels " + p("corpus/labels") + " --out " + p("gt") + " --metric chessboard").code, 0);
  const LabelMap labels = read_label_png(path("corpus/labels/img_0000.png"));
  RealRaster want = distance_map(labels, DistanceMetric::Chessboard);
  for (double& v : want) v = static_cast<float>(v);
  EXPECT_EQ(read_f32r(path("gt/ma/img_0000.f32r")), want);
  EXPECT_EQ(run("gen-gt --labels " + p("corpus/labels") + " --out " + p("gt2") + " --metric taxicab").code, 1);
}

TEST_F(Cli, ThreadCountDoesNotChangeBytes) {
  small_corpus();
  ASSERT_EQ(run("gen-gt --labels " + p("corpus/labels") + " --out " + p("a") + " --threads 1").code, 0);
  ASSERT_EQ(run("gen-gt --labels " + p("corpus/labels") + " --out " + p("b") + " --threads 4").code, 0);
  for (const auto& e : fs::recursive_directory_iterator(path("a"))) {
    if (!e.is_regular_file()) continue;
    const fs::path other = path("b") / fs::relative(e.path(), path("a"));
    EXPECT_EQ(slurp_text(e.path()), slurp_text(other)) << e.path();
  }
}

TEST_F(Cli, ConfigFileOverridesFlags) {
  small_corpus("disk");
  ASSERT_EQ(run("gen-gt --labels " + p("corpus/labels") + " --out " + p("gt")).code, 0);
  std::ofstream(path("cfg.json")) << R"({"min_gland_area": 100000})";
  ASSERT_EQ(run("postprocess --prob " + p("gt/fg") + " --ma " + p("gt/ma") + " --out " + p("pred") +
                " --min-gland-area 1 --config " + p("cfg.json"))
                .code,
            0);
  const auto summary = nlohmann::json::parse(slurp_text(path("pred/summary.json")));
  EXPECT_EQ(summary["min_gland_area"].get<int>(), 100000);
  EXPECT_EQ(summary["total_objects"].get<int>(), 0);
}

TEST_F(Cli, ExitCodes) {
  // Unreadable input.
  EXPECT_EQ(run("gen-gt --labels " + p("nope") + " --out " + p("gt")).code, 2);
  // Malformed PNG.
  fs::create_directories(path("bad"));
  std::ofstream(path("bad/x.png")) << "definitely not a png";
  EXPECT_EQ(run("gen-gt --labels " + p("bad") + " --out " + p("gt")).code, 3);
  // Missing pair.
  fs::create_directories(path("prob"));
  fs::create_directories(path("ma"));
  write_f32r(path("prob/a.f32r"), RealRaster(8, 8));
  write_f32r(path("prob/b.f32r"), RealRaster(8, 8));
  write_f32r(path("ma/a.f32r"), RealRaster(8, 8));
  EXPECT_EQ(run("postprocess --prob " + p("prob") + " --ma " + p("ma") + " --out " + p("pred")).code, 4);
  // Dimension mismatch reports both shapes.
  write_f32r(path("ma/b.f32r"), RealRaster(9, 7));
  const CliResult mismatch = run("postprocess --prob " + p("prob") + " --ma " + p("ma") + " --out " + p("pred"));
  EXPECT_EQ(mismatch.code, 5);
  EXPECT_NE(mismatch.err.find("8x8"), std::string::npos) << mismatch.err;
  EXPECT_NE(mismatch.err.find("9x7"), std::string::npos) << mismatch.err;
  // Usage error.
  EXPECT_EQ(run("postprocess --bogus").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("eval --pred " + p("prob") + " --gt " + p("ma") + " --report " + p("r") + " --match-rule x").code, 1);
}

TEST_F(Cli, EmptyProbabilityMapsGiveEmptyLabels) {
  fs::create_directories(path("prob"));
  fs::create_directories(path("ma"));
  write_f32r(path("prob/z.f32r"), RealRaster(16, 16));
  write_f32r(path("ma/z.f32r"), RealRaster(16, 16));
  ASSERT_EQ(run("postprocess --prob " + p("prob") + " --ma " + p("ma") + " --out " + p("pred")).code, 0);
  EXPECT_EQ(read_label_png(path("pred/z.png")).n_labels, 0u);
}

TEST_F(Cli, EvalSelfAndEmptyPredictions) {
  small_corpus("disk");
  ASSERT_EQ(run("eval --pred " + p("corpus/labels") + " --gt " + p("corpus/labels") + " --report " + p("self")).code,
            0);
  auto rep = nlohmann::json::parse(slurp_text(path("self.json")));
  EXPECT_EQ(rep["mean"]["f1"].get<double>(), 1.0);
  EXPECT_EQ(rep["mean"]["obj_dice"].get<double>(), 1.0);
  EXPECT_EQ(rep["mean"]["obj_h"].get<double>(), 0.0);

  fs::create_directories(path("empty"));
  for (const auto& e : fs::directory_iterator(path("corpus/labels"))) {
    write_label_png(path("empty") / e.path().filename(), LabelMap{LabelImage(128, 128), 0});
  }
  ASSERT_EQ(run("eval --pred " + p("empty") + " --gt " + p("corpus/labels") + " --report " + p("empty_rep")).code, 0);
  rep = nlohmann::json::parse(slurp_text(path("empty_rep.json")));
  EXPECT_EQ(rep["mean"]["f1"].get<double>(), 0.0);

  const std::string first = slurp_text(path("self.csv"));
  ASSERT_EQ(run("eval --pred " + p("corpus/labels") + " --gt " + p("corpus/labels") + " --report " + p("self")).code,
            0);
  EXPECT_EQ(slurp_text(path("self.csv")), first);

  fs::create_directories(path("none"));
  EXPECT_EQ(run("eval --pred " + p("none") + " --gt " + p("corpus/labels") + " --report " + p("x")).code, 4);
}

TEST_F(Cli, RenderOverlay) {
  small_corpus("disk");
  const std::string img = p("corpus/images/img_0000.png");
  ASSERT_EQ(run("render --image " + img + " --labels " + p("corpus/labels/img_0000.png") + " --out " + p("a.png"))
                .code,
            0);
  ASSERT_EQ(run("render --image " + img + " --labels " + p("corpus/labels/img_0000.png") + " --out " + p("b.png"))
                .code,
            0);
  EXPECT_EQ(slurp_text(path("a.png")), slurp_text(path("b.png")));

  write_label_png(path("zero.png"), LabelMap{LabelImage(128, 128), 0});
  ASSERT_EQ(run("render --image " + img + " --labels " + p("zero.png") + " --out " + p("c.png")).code, 0);
  EXPECT_EQ(read_rgb_png(path("c.png")), read_rgb_png(path("corpus/images/img_0000.png")));

  write_label_png(path("small.png"), LabelMap{LabelImage(64, 64), 0});
  EXPECT_EQ(run("render --image " + img + " --labels " + p("small.png") + " --out " + p("d.png")).code, 5);
}

TEST_F(Cli, NetcheckTableAndJson) {
  const CliResult ok = run("netcheck --input 3,512,512 --json " + p("net.json"));
  ASSERT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("(2,512,512)"), std::string::npos);
  EXPECT_NE(ok.out.find("(1,512,512)"), std::string::npos);
  const auto doc = nlohmann::json::parse(slurp_text(path("net.json")));
  std::int64_t total = 0;
  for (const auto& row : doc["layers"]) total += row["params"].get<std::int64_t>();
  EXPECT_EQ(total, doc["total_params"].get<std::int64_t>());
  EXPECT_EQ(total, net::param_count(net::build_network()));
  const CliResult bad = run("netcheck --input 3,500,500");
  EXPECT_EQ(bad.code, 5);
  EXPECT_NE(bad.err.find("32"), std::string::npos);
}

TEST_F(Cli, LossEvalAtGroundTruth) {
  small_corpus("disk");
  ASSERT_EQ(run("gen-gt --labels " + p("corpus/labels") + " --out " + p("gt")).code, 0);
  const CliResult r = run("loss-eval --pred-fg " + p("gt/fg/img_0000.f32r") + " --pred-ma " + p("gt/ma/img_0000.f32r") +
                    " --gt-labels " + p("corpus/labels/img_0000.png"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* k : {"l_inst", "l_ma", "l_mc", "l_top", "total"}) ASSERT_TRUE(j.contains(k)) << k;
  EXPECT_LE(j["l_inst"].get<double>(), 1e-10);
  // The stored map is float32, so the MA term is at float rounding level.
  EXPECT_LE(j["l_ma"].get<double>(), 1e-14);
  EXPECT_NEAR(j["total"].get<double>(), j["l_inst"].get<double>() + j["l_top"].get<double>(), 1e-15);
}

TEST_F(Cli, SynthIsReproducible) {
  small_corpus();
  ASSERT_EQ(run("synth --out " + p("again") + " --count 6 --width 128 --height 128 --min-radius 10 --max-radius 16 "
                "--min-glands 2 --max-glands 4 --families disk,fused-pair,ellipse,blob --threads 3")
                .code,
            0);
  for (const auto& e : fs::recursive_directory_iterator(path("corpus"))) {
    if (!e.is_regular_file()) continue;
    EXPECT_EQ(slurp_text(e.path()), slurp_text(path("again") / fs::relative(e.path(), path("corpus")))) << e.path();
  }
}
