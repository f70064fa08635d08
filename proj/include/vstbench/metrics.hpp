#pragma once

#include <vector>

#include "vstbench/depth_map.hpp"
#include "vstbench/geometry.hpp"
#include "vstbench/image.hpp"
#include "vstbench/stats.hpp"

namespace vstbench::metrics {

using stats::ErrorStats;

// Per-pixel L1 distance |P_est - P_gt| in eye pixels. A pixel is valid when
// both depths are valid and both reprojections land in front of the eye and
// inside its image.
struct SpatialErrorMap {
  Image<double> error;
  Mask valid;
};

struct SpatialError {
  SpatialErrorMap map;
  ErrorStats stats;
};

// The per-pixel map follows the source camera's pixel grid, so swapping
// d_est and d_gt leaves it unchanged.
SpatialError spatial_reprojection_error(const DepthMap& d_est, const DepthMap& d_gt, const geometry::Viewpoint& src,
                                        const geometry::Viewpoint& dst);
SpatialError spatial_reprojection_error(const DepthMap& d_est, const DepthMap& d_gt,
                                        const geometry::RigCalibration& rig, geometry::Side camera,
                                        geometry::Side eye);

// Stats of |d_est - d_gt| in meters over pixels valid in both maps.
ErrorStats depth_mae(const DepthMap& d_est, const DepthMap& d_gt);

// The depth a planar reprojection implicitly assumes: the plane distance
// at every pixel.
DepthMap plane_depth(int width, int height, const geometry::PlaneSpec& plane);

struct RangeBins {
  double start_mm = 250.0;
  double stop_mm = 4000.0;
  double width_mm = 250.0;

  void validate() const;
  std::vector<double> edges() const;
};

struct DepthErrorByRange {
  std::vector<double> edges_mm;  // size = bins + 1
  std::vector<double> mae_mm;    // NaN for empty bins
  std::vector<std::size_t> counts;

  double center(std::size_t bin) const { return 0.5 * (edges_mm[bin] + edges_mm[bin + 1]); }
};

// Pixels bucketed by ground-truth depth; per-bin mean |d_est - d_gt|.
DepthErrorByRange depth_error_by_range(const DepthMap& d_est, const DepthMap& d_gt, const RangeBins& bins = {});

}  // namespace vstbench::metrics
