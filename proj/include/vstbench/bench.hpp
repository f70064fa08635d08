#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vstbench/depth_pipeline.hpp"
#include "vstbench/geometry.hpp"
#include "vstbench/metrics.hpp"
#include "vstbench/passthrough.hpp"
#include "vstbench/scene.hpp"
#include "vstbench/warping.hpp"

namespace vstbench::bench {

using geometry::Side;
using passthrough::Mode;

struct WarpingClipConfig {
  bool enabled = true;
  std::string scene = "fiducial";
  Side eye = Side::Right;
  int frames = 45;
  metrics::WarpingParams params = default_params();

  static metrics::WarpingParams default_params() {
    metrics::WarpingParams p;
    p.localization_noise_px = 0.3;
    return p;
  }
};

struct BenchmarkConfig {
  std::string rig_file;  // empty: built-in default rig
  std::vector<std::string> scenes = scene::suite_names();
  scene::TrajectorySpec trajectory;
  std::vector<Mode> modes = passthrough::all_modes();
  depth::DepthCorruptionSpec corruption = depth::DepthCorruptionSpec::benchmark_default(0);
  double smooth_sigma_px = 2.0;
  double oversmooth_sigma_px = 8.0;
  geometry::PlaneSpec plane;
  passthrough::MeshOptions mesh;
  metrics::RangeBins bins;
  int frame_stride = 5;  // spatial metrics use every n-th trajectory frame
  int depth_lag = 0;     // GAP uses depth estimated this many frames earlier
  WarpingClipConfig warping;
  std::uint64_t seed = 1;
  std::string output_dir = "bench_out";

  void validate() const;
  double sigma_for(Mode m) const;
};

// Mean over scenes of per-scene means, with spreads at three levels: across
// per-scene means, across all per-frame means, and across all pixels.
struct CellStats {
  double mean = 0.0;
  double sd_scene = 0.0;
  double sd_frame = 0.0;
  double sd_pixel = 0.0;
  std::size_t scenes = 0;
  std::size_t frames = 0;
  std::size_t pixels = 0;
};

struct ModeRow {
  Mode mode = Mode::DP;
  std::array<CellStats, 2> spatial;  // indexed by Side
  std::array<CellStats, 2> depth;
};

struct FrameRecord {
  std::string scene;
  int frame = 0;
  Mode mode = Mode::DP;
  Side eye = Side::Left;
  double spatial_mean = 0.0;
  double spatial_sd = 0.0;
  std::size_t spatial_pixels = 0;
  double depth_mae = 0.0;
  double depth_sd = 0.0;
  std::size_t depth_pixels = 0;
};

struct RangeRow {
  Mode mode = Mode::DP;
  Side eye = Side::Left;
  metrics::DepthErrorByRange by_range;
};

struct WarpingRow {
  Mode mode = Mode::DP;
  metrics::WarpingReport report;
};

struct BenchmarkResult {
  std::vector<ModeRow> table;
  std::vector<FrameRecord> frames;
  std::vector<RangeRow> ranges;
  std::vector<WarpingRow> warping;
};

struct BenchmarkInputs {
  geometry::RigCalibration rig;
  std::vector<scene::Scene> scenes;
  std::vector<scene::Scene> warping_scene;  // empty or one scene with a target
};

// Depth estimate a mode feeds to reprojection for one eye, given the
// corrupted left-camera depth.
DepthMap estimate_depth(Mode mode, Side eye, const DepthMap& corrupted_left, const geometry::RigCalibration& rig,
                        const BenchmarkConfig& config);

BenchmarkResult run_spatial(const BenchmarkConfig& config, const BenchmarkInputs& inputs);
std::vector<WarpingRow> run_warping(const BenchmarkConfig& config, const geometry::RigCalibration& rig,
                                    const scene::Scene& scene);
BenchmarkResult run(const BenchmarkConfig& config, const BenchmarkInputs& inputs);

// Scenes named by the config that belong to the built-in suite.
BenchmarkInputs suite_inputs(const BenchmarkConfig& config, const geometry::RigCalibration& rig);

}  // namespace vstbench::bench
