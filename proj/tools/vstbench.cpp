#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vstbench/bench.hpp"
#include "vstbench/error.hpp"
#include "vstbench/io.hpp"
#include "vstbench/metrics.hpp"
#include "vstbench/report.hpp"
#include "vstbench/scene.hpp"
#include "vstbench/study.hpp"
#include "vstbench/warping.hpp"

namespace fs = std::filesystem;
using namespace vstbench;

namespace {

constexpr int kOk = 0;
constexpr int kDiffers = 1;
constexpr int kConfigError = 2;
constexpr int kPipelineError = 3;

struct Workspace {
  std::string root;

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    if (path.is_absolute()) return path;
    return fs::path(root.empty() ? "." : root) / path;
  }
};

geometry::RigCalibration load_rig_or_default(const Workspace& ws, const std::string& rig) {
  return rig.empty() ? geometry::make_rig() : io::load_rig(ws.resolve(rig));
}

scene::Scene scene_by_name(const Workspace& ws, const std::string& name, const geometry::RigCalibration& rig,
                           std::uint64_t seed) {
  const auto names = scene::suite_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) return scene::make_suite_scene(name, rig, seed);
  return io::load_scene(ws.resolve(name));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string frame_stem(const std::string& scene, int frame, geometry::Side side) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_f%03d_", frame);
  return scene + buf + std::string(geometry::to_string(side));
}

// ---- scene -----------------------------------------------------------------

struct SceneGenArgs {
  std::string suite = "default";
  std::string rig;
  std::uint64_t seed = 1;
  std::string out = "scenes";
};

int scene_gen(const Workspace& ws, const SceneGenArgs& a) {
  const auto rig = load_rig_or_default(ws, a.rig);
  std::vector<std::string> names = a.suite == "default" ? scene::suite_names() : split_list(a.suite);
  for (const auto& n : names) {
    const auto sc = scene_by_name(ws, n, rig, a.seed);
    const auto path = ws.resolve(a.out) / (sc.name() + ".json");
    io::write_json(path, io::scene_to_json(sc));
    std::cout << path.string() << "\n";
  }
  return kOk;
}

struct SceneRenderArgs {
  std::string scene = "fiducial";
  std::string rig;
  std::uint64_t seed = 1;
  int frames = 1;
  int supersample = 1;
  std::string out = "frames";
};

int scene_render(const Workspace& ws, const SceneRenderArgs& a) {
  if (a.frames < 1) throw ConfigError("--frames must be >= 1");
  const auto rig = load_rig_or_default(ws, a.rig);
  const auto sc = scene_by_name(ws, a.scene, rig, a.seed);
  scene::TrajectorySpec ts;
  ts.frames = std::max(a.frames, ts.frames);
  const auto trajectory = scene::make_trajectory(ts);
  scene::RenderOptions ro;
  ro.supersample = a.supersample;
  const fs::path dir = ws.resolve(a.out);
  for (int f = 0; f < a.frames; ++f) {
    for (auto side : {geometry::Side::Left, geometry::Side::Right}) {
      const auto frame = scene::render(sc, geometry::place(rig.camera(side), trajectory[f]), ro);
      const std::string stem = frame_stem(sc.name(), f, side);
      io::write_png(dir / (stem + ".png"), frame.image);
      io::write_depth(dir / (stem + ".depth"), frame.depth);
    }
  }
  std::cout << "rendered " << a.frames << " stereo frame(s) of '" << sc.name() << "' to " << dir.string() << "\n";
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string modes;
  std::string scenes;
  std::optional<std::uint64_t> seed;
  std::optional<int> frame_stride;
  std::optional<int> warping_frames;
  std::optional<int> depth_lag;
  std::optional<double> noise;
  bool no_warping = false;
  std::string out;
};

int bench_run(const Workspace& ws, const BenchArgs& a) {
  bench::BenchmarkConfig c = a.config.empty() ? bench::BenchmarkConfig{} : io::load_config(ws.resolve(a.config));
  if (!a.modes.empty()) {
    c.modes.clear();
    for (const auto& m : split_list(a.modes)) c.modes.push_back(passthrough::parse_mode(m));
  }
  if (!a.scenes.empty()) c.scenes = split_list(a.scenes);
  if (a.seed) c.seed = *a.seed;
  if (a.frame_stride) c.frame_stride = *a.frame_stride;
  if (a.warping_frames) c.warping.frames = *a.warping_frames;
  if (a.depth_lag) c.depth_lag = *a.depth_lag;
  if (a.noise) c.warping.params.localization_noise_px = *a.noise;
  if (a.no_warping) c.warping.enabled = false;
  if (!a.out.empty()) c.output_dir = a.out;
  c.validate();

  const auto inputs = io::resolve_inputs(c, ws.resolve("."));
  const auto result = bench::run(c, inputs);
  const fs::path dir = ws.resolve(c.output_dir);
  io::write_json(dir / "report.json", report::benchmark_json(c, result));
  io::write_text(dir / "table1.csv", report::table1_csv(result));
  io::write_text(dir / "depth_error_by_range.csv", report::by_range_csv(result));
  io::write_text(dir / "frames.csv", report::frames_csv(result));
  if (!result.warping.empty()) io::write_text(dir / "table2.csv", report::table2_csv(result));
  std::cout << report::table1_text(result);
  if (!result.warping.empty()) std::cout << "\n" << report::table2_text(result);
  std::cout << "\nreport written to " << dir.string() << "\n";
  return kOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalSpatialArgs {
  std::string est, gt, rig;
  std::string camera = "left", eye = "left";
  std::string heatmap;
  double heatmap_max = 5.0;
  std::string json;
};

int eval_spatial(const Workspace& ws, const EvalSpatialArgs& a) {
  const auto rig = load_rig_or_default(ws, a.rig);
  const auto est = io::read_depth(ws.resolve(a.est));
  const auto gt = io::read_depth(ws.resolve(a.gt));
  if (!est.same_size(gt)) throw ConfigError("depth maps differ in size");
  const auto err = metrics::spatial_reprojection_error(est, gt, rig, geometry::parse_side(a.camera),
                                                       geometry::parse_side(a.eye));
  const auto mae = metrics::depth_mae(est, gt);
  io::Json j{{"spatial_error_px", report::error_stats_json(err.stats)}, {"depth_error_m", report::error_stats_json(mae)}};
  if (!a.heatmap.empty())
    io::write_png_rgb(ws.resolve(a.heatmap), est.width(), est.height(),
                      io::error_heatmap(err.map.error, err.map.valid, a.heatmap_max));
  if (!a.json.empty()) io::write_json(ws.resolve(a.json), j);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

struct EvalWarpArgs {
  std::vector<std::string> frames;
  std::string scene = "fiducial";
  std::string rig;
  std::uint64_t seed = 1;
  double noise = 0.0;
  bool inliers_only = false;
  std::string json;
};

int eval_warp(const Workspace& ws, const EvalWarpArgs& a) {
  const auto rig = load_rig_or_default(ws, a.rig);
  const auto sc = scene_by_name(ws, a.scene, rig, a.seed);
  if (sc.targets().empty()) throw ConfigError("scene '" + sc.name() + "' has no fiducial target");
  std::vector<fs::path> paths;
  for (const auto& f : a.frames) {
    const fs::path p = ws.resolve(f);
    if (fs::is_directory(p)) {
      std::vector<fs::path> in_dir;
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".png") in_dir.push_back(e.path());
      std::sort(in_dir.begin(), in_dir.end());
      paths.insert(paths.end(), in_dir.begin(), in_dir.end());
    } else {
      paths.push_back(p);
    }
  }
  if (paths.empty()) throw ConfigError("no frames given");
  std::vector<ImageF> images;
  for (const auto& p : paths) images.push_back(io::read_png(p));
  std::vector<metrics::FrameInput> clip;
  for (std::size_t i = 0; i < images.size(); ++i) clip.push_back({&images[i], static_cast<int>(i), std::nullopt});
  metrics::WarpingParams params;
  params.localization_noise_px = a.noise;
  params.ransac.inliers_only = a.inliers_only;
  const auto rep = metrics::warping_error(clip, sc.targets().front(), sc.target_reference(0), params);
  const auto j = report::warping_json(rep, true);
  if (!a.json.empty()) io::write_json(ws.resolve(a.json), j);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// ---- study -----------------------------------------------------------------

struct StudyArgs {
  std::string csv;
  std::string out;
  std::string total_rule = "raw";
  std::string parametric;
  double alpha = 0.05;
};

study::StudyConfig study_config(const StudyArgs& a) {
  study::StudyConfig c;
  if (a.total_rule == "raw") c.total_rule = study::TotalRule::RawSum;
  else if (a.total_rule == "subscale") c.total_rule = study::TotalRule::SubscaleSum;
  else throw ConfigError("--total-rule must be 'raw' or 'subscale'");
  if (!a.parametric.empty()) c.parametric = a.parametric == "none" ? std::vector<std::string>{} : split_list(a.parametric);
  if (!(a.alpha > 0 && a.alpha < 1)) throw ConfigError("--alpha must be in (0, 1)");
  c.alpha = a.alpha;
  return c;
}

study::StudyReport load_and_score(const Workspace& ws, const StudyArgs& a, const study::StudyConfig& c) {
  const fs::path path = ws.resolve(a.csv);
  const auto records = study::parse_study_csv(io::read_text(path), path.string());
  auto rep = study::score_study(records, c);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  return rep;
}

int study_score(const Workspace& ws, const StudyArgs& a) {
  const auto c = study_config(a);
  const auto rep = load_and_score(ws, a, c);
  if (!a.out.empty()) {
    const fs::path dir = ws.resolve(a.out);
    io::write_text(dir / "ssq.csv", report::ssq_csv(rep));
    io::write_text(dir / "symptoms.csv", report::symptoms_csv(rep));
    io::write_text(dir / "discomfort.csv", report::discomfort_csv(rep));
    io::write_text(dir / "performance.csv", report::performance_csv(rep));
    io::write_json(dir / "study_report.json", report::study_json(rep, c));
  }
  std::cout << "participants: " << rep.participants << " (excluded " << rep.excluded.size() << ")\n";
  std::cout << report::ssq_csv(rep);
  return kOk;
}

int study_test(const Workspace& ws, const StudyArgs& a) {
  const auto c = study_config(a);
  const auto rep = load_and_score(ws, a, c);
  if (!a.out.empty()) {
    const fs::path dir = ws.resolve(a.out);
    io::write_text(dir / "tests.csv", report::tests_csv(rep));
    io::write_json(dir / "study_report.json", report::study_json(rep, c));
  }
  std::cout << report::tests_text(rep);
  return kOk;
}

struct SynthArgs {
  std::string out = "synthetic_cohort.csv";
  int participants = 25;
  std::uint64_t seed = 2024;
  bool complete = false;
};

int study_synth(const Workspace& ws, const SynthArgs& a) {
  study::CohortSpec spec;
  spec.participants = a.participants;
  spec.seed = a.seed;
  spec.include_incomplete = !a.complete;
  io::write_text(ws.resolve(a.out), study::write_study_csv(study::synth_cohort(spec)));
  std::cout << ws.resolve(a.out).string() << "\n";
  return kOk;
}

// ---- report ----------------------------------------------------------------

struct DiffArgs {
  std::string expected, actual;
  double abs_tol = 1e-9, rel_tol = 1e-9;
  bool update = false;
};

int report_diff(const Workspace& ws, const DiffArgs& a) {
  const fs::path expected = ws.resolve(a.expected), actual = ws.resolve(a.actual);
  if (a.update) {
    io::write_text(expected, io::read_text(actual));
    std::cout << "updated " << expected.string() << "\n";
    return kOk;
  }
  const auto diffs = report::diff(io::read_json(expected), io::read_json(actual), {a.abs_tol, a.rel_tol});
  for (const auto& d : diffs) std::cout << d << "\n";
  if (diffs.empty()) {
    std::cout << "reports match\n";
    return kOk;
  }
  std::cout << diffs.size() << " difference(s)\n";
  return kDiffers;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vstbench: synthetic benchmark for video see-through passthrough reprojection"};
  app.require_subcommand(1);
  Workspace ws;
  if (const char* env = std::getenv("VSTBENCH_WORKSPACE")) ws.root = env;
  app.add_option("-w,--workspace", ws.root, "Workspace root for relative paths (env VSTBENCH_WORKSPACE)");

  std::function<int()> action;

  auto* scene_cmd = app.add_subcommand("scene", "Generate scene files or render frames");
  scene_cmd->require_subcommand(1);
  SceneGenArgs gen;
  auto* gen_cmd = scene_cmd->add_subcommand("gen", "Write scene description files");
  gen_cmd->add_option("--suite", gen.suite, "'default' or a comma-separated list of suite scene names");
  gen_cmd->add_option("--rig", gen.rig, "Rig calibration JSON (default: built-in rig)");
  gen_cmd->add_option("--seed", gen.seed, "Scene seed");
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->callback([&] { action = [&] { return scene_gen(ws, gen); }; });

  SceneRenderArgs ren;
  auto* ren_cmd = scene_cmd->add_subcommand("render", "Render stereo frames (PNG + depth sidecar)");
  ren_cmd->add_option("--scene", ren.scene, "Suite scene name or scene JSON file");
  ren_cmd->add_option("--rig", ren.rig, "Rig calibration JSON");
  ren_cmd->add_option("--seed", ren.seed, "Scene seed for suite scenes");
  ren_cmd->add_option("--frames", ren.frames, "Number of trajectory frames");
  ren_cmd->add_option("--supersample", ren.supersample, "Intensity samples per pixel axis");
  ren_cmd->add_option("--out", ren.out, "Output directory");
  ren_cmd->callback([&] { action = [&] { return scene_render(ws, ren); }; });

  auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark pipeline");
  bench_cmd->require_subcommand(1);
  BenchArgs ba;
  auto* run_cmd = bench_cmd->add_subcommand("run", "Render, corrupt depth, reproject, measure and report");
  run_cmd->add_option("--config", ba.config, "Benchmark config JSON; flags below override it");
  run_cmd->add_option("--modes", ba.modes, "Comma-separated modes: dp, gap-raw, gap-smooth, gap-oversmooth");
  run_cmd->add_option("--scenes", ba.scenes, "Comma-separated suite names or scene files");
  run_cmd->add_option("--seed", ba.seed, "Master seed");
  run_cmd->add_option("--frame-stride", ba.frame_stride, "Use every n-th trajectory frame for spatial metrics");
  run_cmd->add_option("--warping-frames", ba.warping_frames, "Frames in the warping clip");
  run_cmd->add_option("--depth-lag", ba.depth_lag, "GAP uses depth from this many frames earlier");
  run_cmd->add_option("--localization-noise", ba.noise, "Localization noise (px) in the warping metric");
  run_cmd->add_flag("--no-warping", ba.no_warping, "Skip the warping clip");
  run_cmd->add_option("--out", ba.out, "Output directory");
  run_cmd->callback([&] { action = [&] { return bench_run(ws, ba); }; });

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a single metric on files");
  eval_cmd->require_subcommand(1);
  EvalSpatialArgs es;
  auto* sp_cmd = eval_cmd->add_subcommand("spatial", "Spatial reprojection error between depth sidecars");
  sp_cmd->add_option("--est", es.est, "Estimated depth sidecar")->required();
  sp_cmd->add_option("--gt", es.gt, "Ground-truth depth sidecar")->required();
  sp_cmd->add_option("--rig", es.rig, "Rig calibration JSON");
  sp_cmd->add_option("--camera", es.camera, "Camera side the depth maps belong to");
  sp_cmd->add_option("--eye", es.eye, "Eye to reproject into");
  sp_cmd->add_option("--heatmap", es.heatmap, "Write an error heatmap PNG");
  sp_cmd->add_option("--heatmap-max", es.heatmap_max, "Error (px) mapped to the top of the color ramp");
  sp_cmd->add_option("--json", es.json, "Write the result as JSON");
  sp_cmd->callback([&] { action = [&] { return eval_spatial(ws, es); }; });

  EvalWarpArgs ew;
  auto* wp_cmd = eval_cmd->add_subcommand("warp", "Warping residuals of synthesized frames showing a fiducial");
  wp_cmd->add_option("frames", ew.frames, "PNG frames or directories of PNG frames")->required();
  wp_cmd->add_option("--scene", ew.scene, "Scene providing the fiducial target");
  wp_cmd->add_option("--rig", ew.rig, "Rig calibration JSON");
  wp_cmd->add_option("--seed", ew.seed, "Scene seed for suite scenes");
  wp_cmd->add_option("--localization-noise", ew.noise, "Localization noise (px)");
  wp_cmd->add_flag("--inliers-only", ew.inliers_only, "Report residuals of RANSAC inliers only");
  wp_cmd->add_option("--json", ew.json, "Write the result as JSON");
  wp_cmd->callback([&] { action = [&] { return eval_warp(ws, ew); }; });

  auto* study_cmd = app.add_subcommand("study", "User-study analysis");
  study_cmd->require_subcommand(1);
  StudyArgs sa;
  auto add_study_opts = [&](CLI::App* cmd) {
    cmd->add_option("--csv", sa.csv, "Study CSV")->required();
    cmd->add_option("--out", sa.out, "Output directory for tables and JSON");
    cmd->add_option("--total-rule", sa.total_rule, "Total severity: 'raw' (sum of items) or 'subscale'");
    cmd->add_option("--parametric", sa.parametric, "Comma-separated variables for RM-ANOVA/t-tests, or 'none'");
    cmd->add_option("--alpha", sa.alpha, "Significance level");
  };
  auto* score_cmd = study_cmd->add_subcommand("score", "Descriptive tables");
  add_study_opts(score_cmd);
  score_cmd->callback([&] { action = [&] { return study_score(ws, sa); }; });
  auto* test_cmd = study_cmd->add_subcommand("test", "Test battery with Holm adjustment");
  add_study_opts(test_cmd);
  test_cmd->callback([&] { action = [&] { return study_test(ws, sa); }; });
  SynthArgs sy;
  auto* synth_cmd = study_cmd->add_subcommand("synth", "Write a synthetic cohort CSV");
  synth_cmd->add_option("--out", sy.out, "Output CSV");
  synth_cmd->add_option("--participants", sy.participants, "Participants");
  synth_cmd->add_option("--seed", sy.seed, "Seed");
  synth_cmd->add_flag("--complete", sy.complete, "Do not include an incomplete participant");
  synth_cmd->callback([&] { action = [&] { return study_synth(ws, sy); }; });

  auto* report_cmd = app.add_subcommand("report", "Report utilities");
  report_cmd->require_subcommand(1);
  DiffArgs da;
  auto* diff_cmd = report_cmd->add_subcommand("diff", "Compare JSON reports; exit 1 when they differ");
  diff_cmd->add_option("expected", da.expected, "Reference report")->required();
  diff_cmd->add_option("actual", da.actual, "Report to check")->required();
  diff_cmd->add_option("--abs-tol", da.abs_tol, "Absolute tolerance for numbers");
  diff_cmd->add_option("--rel-tol", da.rel_tol, "Relative tolerance for numbers");
  diff_cmd->add_flag("--update", da.update, "Overwrite the reference with the actual report");
  diff_cmd->callback([&] { action = [&] { return report_diff(ws, da); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  try {
    return action ? action() : kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kPipelineError;
  }
}
