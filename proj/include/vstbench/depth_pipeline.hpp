#pragma once

#include <cstdint>

#include "vstbench/depth_map.hpp"
#include "vstbench/geometry.hpp"

namespace vstbench::depth {

// Error model standing in for a stereo depth estimator. Each stage is
// disabled by its zero value.
struct DepthCorruptionSpec {
  // Foreground depth bleeds this many pixels over the background side of an
  // occlusion edge.
  int boundary_dilation_px = 0;
  // Multiplicative log-normal noise, sigma of log depth.
  double noise_sigma_rel = 0.0;
  // Inverse depth quantized to this many levels over [1/max_depth, 1/min_depth];
  // 0 disables.
  int disparity_levels = 0;
  double min_depth = 0.25;
  double max_depth = 10.0;
  // Relative depth jump that counts as an occlusion edge for dilation.
  double edge_jump = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
  bool is_identity() const { return boundary_dilation_px == 0 && noise_sigma_rel == 0.0 && disparity_levels == 0; }

  // Dilation 2 px, noise 1%, 128 disparity levels.
  static DepthCorruptionSpec benchmark_default(std::uint64_t seed);
};

struct SmoothingSpec {
  double sigma_px = 0.0;  // 0 = pass-through

  void validate() const;
  int radius() const;
};

// Dilation, then quantization, then noise; deterministic per seed.
DepthMap corrupt_depth(const DepthMap& gt, const DepthCorruptionSpec& spec);

// Validity-weighted separable Gaussian on inverse depth.
DepthMap smooth_depth(const DepthMap& d, const SmoothingSpec& spec);

struct WarpedDepth {
  DepthMap depth;
  Mask filled;  // 1 where the value came from hole filling
};

// Forward-warps the left camera's depth into the right camera with a
// z-buffer. Holes bounded on both sides within a row take the
// background-side (farther) neighbor; one-sided holes stay invalid.
WarpedDepth warp_depth(const DepthMap& src_depth, const geometry::Viewpoint& src, const geometry::Viewpoint& dst);
WarpedDepth warp_depth_left_to_right(const DepthMap& d_left, const geometry::RigCalibration& rig);

}  // namespace vstbench::depth
