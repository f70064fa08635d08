#include "vstbench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "vstbench/error.hpp"
#include "vstbench/random.hpp"

namespace vstbench::bench {

namespace {

constexpr std::array<Side, 2> kSides = {Side::Left, Side::Right};

std::size_t side_index(Side s) { return s == Side::Left ? 0 : 1; }

template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(stage + ": " + e.what());
  }
}

// Running sums for one table cell.
struct CellAccumulator {
  std::map<std::string, std::vector<double>> per_scene;  // per-frame means
  double sum = 0.0, sumsq = 0.0;
  std::size_t pixels = 0;

  void add(const std::string& scene, const stats::ErrorStats& s) {
    per_scene[scene].push_back(s.mean);
    const double n = static_cast<double>(s.count);
    sum += s.mean * n;
    sumsq += s.stddev * s.stddev * (n - 1.0) + n * s.mean * s.mean;
    pixels += s.count;
  }

  CellStats finish(const std::vector<std::string>& order) const {
    CellStats c;
    std::vector<double> scene_means, frame_means;
    for (const auto& name : order) {
      auto it = per_scene.find(name);
      if (it == per_scene.end() || it->second.empty()) continue;
      scene_means.push_back(stats::mean(it->second));
      frame_means.insert(frame_means.end(), it->second.begin(), it->second.end());
    }
    if (scene_means.empty()) return c;
    c.mean = stats::mean(scene_means);
    c.sd_scene = stats::sample_sd(scene_means);
    c.sd_frame = stats::sample_sd(frame_means);
    c.scenes = scene_means.size();
    c.frames = frame_means.size();
    c.pixels = pixels;
    if (pixels > 1) {
      const double n = static_cast<double>(pixels);
      c.sd_pixel = std::sqrt(std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)));
    }
    return c;
  }
};

struct RangeAccumulator {
  std::vector<double> edges, sum;
  std::vector<std::size_t> counts;

  void add(const metrics::DepthErrorByRange& r) {
    if (edges.empty()) {
      edges = r.edges_mm;
      sum.assign(r.counts.size(), 0.0);
      counts.assign(r.counts.size(), 0);
    }
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
      if (r.counts[i] == 0) continue;
      sum[i] += r.mae_mm[i] * static_cast<double>(r.counts[i]);
      counts[i] += r.counts[i];
    }
  }

  metrics::DepthErrorByRange finish() const {
    metrics::DepthErrorByRange out;
    out.edges_mm = edges;
    out.counts = counts;
    out.mae_mm.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      out.mae_mm[i] = counts[i] ? sum[i] / static_cast<double>(counts[i]) : std::nan("");
    return out;
  }
};

std::vector<int> spatial_frames(const BenchmarkConfig& c) {
  std::vector<int> out;
  for (int f = 0; f < c.trajectory.frames; f += c.frame_stride) out.push_back(f);
  return out;
}

DepthMap corrupted_left_depth(const BenchmarkConfig& config, const scene::Scene& scene,
                              const geometry::RigCalibration& rig, const std::vector<geometry::Pose>& trajectory,
                              int frame, std::uint64_t stream) {
  const int src = std::max(0, frame - config.depth_lag);
  const DepthMap gt = scene::raycast_depth(scene, geometry::place(rig.left_camera, trajectory[src]));
  depth::DepthCorruptionSpec spec = config.corruption;
  spec.seed = mix_seed(mix_seed(config.seed, stream), static_cast<std::uint64_t>(src));
  return depth::corrupt_depth(gt, spec);
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (scenes.empty()) throw ConfigError("config: at least one scene is required");
  if (modes.empty()) throw ConfigError("config: at least one passthrough mode is required");
  if (trajectory.frames < 1) throw ConfigError("config: trajectory needs at least one frame");
  if (frame_stride < 1) throw ConfigError("config: frame_stride must be >= 1");
  if (depth_lag < 0) throw ConfigError("config: depth_lag must be >= 0");
  if (smooth_sigma_px < 0 || oversmooth_sigma_px < 0) throw ConfigError("config: smoothing sigma must be >= 0");
  if (mesh.stride < 1) throw ConfigError("config: mesh stride must be >= 1");
  if (!(plane.distance > 0)) throw ConfigError("config: plane distance must be positive");
  if (warping.enabled && (warping.frames < 1 || warping.frames > trajectory.frames))
    throw ConfigError("config: warping frames must be in [1, trajectory frames]");
  if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  try {
    corruption.validate();
    bins.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

double BenchmarkConfig::sigma_for(Mode m) const {
  switch (m) {
    case Mode::GapSmooth: return smooth_sigma_px;
    case Mode::GapOversmooth: return oversmooth_sigma_px;
    default: return 0.0;
  }
}

DepthMap estimate_depth(Mode mode, Side eye, const DepthMap& corrupted_left, const geometry::RigCalibration& rig,
                        const BenchmarkConfig& config) {
  if (mode == Mode::DP)
    return metrics::plane_depth(corrupted_left.width(), corrupted_left.height(), config.plane);
  const depth::SmoothingSpec smoothing{config.sigma_for(mode)};
  if (eye == Side::Left) return depth::smooth_depth(corrupted_left, smoothing);
  return depth::smooth_depth(depth::warp_depth_left_to_right(corrupted_left, rig).depth, smoothing);
}

BenchmarkResult run_spatial(const BenchmarkConfig& config, const BenchmarkInputs& inputs) {
  const auto& rig = inputs.rig;
  const auto trajectory = scene::make_trajectory(config.trajectory);
  const auto frames = spatial_frames(config);

  std::vector<std::string> order;
  std::map<std::pair<Mode, std::size_t>, CellAccumulator> spatial, depth_err;
  std::map<std::pair<Mode, std::size_t>, RangeAccumulator> ranges;
  BenchmarkResult result;

  for (std::size_t si = 0; si < inputs.scenes.size(); ++si) {
    const auto& sc = inputs.scenes[si];
    order.push_back(sc.name());
    for (int f : frames) {
      const std::string where = "scene '" + sc.name() + "' frame " + std::to_string(f);
      const auto gt = staged("render " + where, [&] {
        return std::array<DepthMap, 2>{scene::raycast_depth(sc, geometry::place(rig.left_camera, trajectory[f])),
                                       scene::raycast_depth(sc, geometry::place(rig.right_camera, trajectory[f]))};
      });
      const DepthMap corrupted =
          staged("depth " + where, [&] { return corrupted_left_depth(config, sc, rig, trajectory, f, si); });
      for (Mode mode : config.modes) {
        for (Side eye : kSides) {
          const std::size_t e = side_index(eye);
          const DepthMap est = staged("depth " + where, [&] { return estimate_depth(mode, eye, corrupted, rig, config); });
          const auto err = staged("spatial " + where, [&] {
            return metrics::spatial_reprojection_error(est, gt[e], rig, eye, eye);
          });
          const auto mae = staged("depth-error " + where, [&] { return metrics::depth_mae(est, gt[e]); });
          spatial[{mode, e}].add(sc.name(), err.stats);
          depth_err[{mode, e}].add(sc.name(), mae);
          ranges[{mode, e}].add(metrics::depth_error_by_range(est, gt[e], config.bins));
          result.frames.push_back({sc.name(), f, mode, eye, err.stats.mean, err.stats.stddev, err.stats.count,
                                   mae.mean, mae.stddev, mae.count});
        }
      }
    }
  }

  for (Mode mode : config.modes) {
    ModeRow row;
    row.mode = mode;
    for (Side eye : kSides) {
      const std::size_t e = side_index(eye);
      row.spatial[e] = spatial[{mode, e}].finish(order);
      row.depth[e] = depth_err[{mode, e}].finish(order);
      result.ranges.push_back({mode, eye, ranges[{mode, e}].finish()});
    }
    result.table.push_back(row);
  }
  return result;
}

std::vector<WarpingRow> run_warping(const BenchmarkConfig& config, const geometry::RigCalibration& rig,
                                    const scene::Scene& sc) {
  if (sc.targets().empty()) throw ConfigError("config: warping scene '" + sc.name() + "' has no fiducial target");
  const auto trajectory = scene::make_trajectory(config.trajectory);
  const auto& clip = config.warping;
  const Side eye = clip.eye;
  const auto& target = sc.targets().front();
  const ImageF& reference = sc.target_reference(0);
  const std::uint64_t stream = 0x57A2Bu;

  std::map<Mode, std::vector<metrics::FrameWarping>> per_mode;
  for (int f = 0; f < clip.frames; ++f) {
    const std::string where = "warping frame " + std::to_string(f);
    const auto cam_vp = geometry::place(rig.camera(eye), trajectory[f]);
    const auto frame = staged("render " + where, [&] { return scene::render(sc, cam_vp); });
    DepthMap corrupted;
    const bool any_gap = std::any_of(config.modes.begin(), config.modes.end(), passthrough::is_gap);
    if (any_gap)
      corrupted = staged("depth " + where, [&] { return corrupted_left_depth(config, sc, rig, trajectory, f, stream); });
    std::optional<std::array<geometry::PixelCoord, 4>> oracle;
    if (clip.params.detection == metrics::DetectionMode::Oracle)
      oracle = metrics::project_target_corners(sc, 0, geometry::place(rig.eye(eye), trajectory[f]));
    for (Mode mode : config.modes) {
      const auto view = staged("reproject " + where, [&] {
        if (mode == Mode::DP) return passthrough::dp_reproject(frame, rig, eye, config.plane, config.mesh);
        const DepthMap est = estimate_depth(mode, eye, corrupted, rig, config);
        return passthrough::gap_reproject(frame, est, rig, eye, mode, config.mesh);
      });
      metrics::FrameInput input{&view.image, f, oracle};
      per_mode[mode].push_back(metrics::evaluate_frame(input, target, reference, clip.params));
    }
  }

  std::vector<WarpingRow> rows;
  for (Mode mode : config.modes)
    rows.push_back({mode, staged("warping " + passthrough::to_string(mode),
                                 [&] { return metrics::summarize_warping(per_mode[mode]); })});
  return rows;
}

BenchmarkResult run(const BenchmarkConfig& config, const BenchmarkInputs& inputs) {
  config.validate();
  BenchmarkResult result = run_spatial(config, inputs);
  if (config.warping.enabled) {
    if (inputs.warping_scene.empty()) throw ConfigError("config: warping clip enabled but no warping scene given");
    result.warping = run_warping(config, inputs.rig, inputs.warping_scene.front());
  }
  return result;
}

BenchmarkInputs suite_inputs(const BenchmarkConfig& config, const geometry::RigCalibration& rig) {
  BenchmarkInputs in{rig, {}, {}};
  const auto names = scene::suite_names();
  auto build = [&](const std::string& name) {
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw ConfigError("config: unknown suite scene '" + name + "'");
    return scene::make_suite_scene(name, rig, config.seed);
  };
  for (const auto& n : config.scenes) in.scenes.push_back(build(n));
  if (config.warping.enabled) in.warping_scene.push_back(build(config.warping.scene));
  return in;
}

}  // namespace vstbench::bench
