#include "vstbench/metrics.hpp"

#include <cmath>
#include <limits>

#include "vstbench/error.hpp"

namespace vstbench::metrics {

SpatialError spatial_reprojection_error(const DepthMap& d_est, const DepthMap& d_gt, const geometry::Viewpoint& src,
                                        const geometry::Viewpoint& dst) {
  if (!d_est.same_size(d_gt)) throw ConfigError("spatial error: depth maps differ in size");
  if (d_gt.width() != src.intrinsics.width || d_gt.height() != src.intrinsics.height)
    throw ConfigError("spatial error: depth size does not match source intrinsics");
  SpatialError out;
  out.map.error = Image<double>(d_gt.width(), d_gt.height());
  out.map.valid = Mask(d_gt.width(), d_gt.height());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(d_gt.width()) * static_cast<std::size_t>(d_gt.height()));
  for (int y = 0; y < d_gt.height(); ++y) {
    for (int x = 0; x < d_gt.width(); ++x) {
      if (!d_est.valid(x, y) || !d_gt.valid(x, y)) continue;
      const geometry::PixelCoord p{static_cast<double>(x), static_cast<double>(y)};
      const auto est = geometry::reproject(p, d_est(x, y), src, dst);
      const auto gt = geometry::reproject(p, d_gt(x, y), src, dst);
      if (!est || !gt || !dst.intrinsics.contains(est->pixel) || !dst.intrinsics.contains(gt->pixel)) continue;
      const double e = std::abs(est->pixel.u - gt->pixel.u) + std::abs(est->pixel.v - gt->pixel.v);
      out.map.error(x, y) = e;
      out.map.valid(x, y) = 1;
      values.push_back(e);
    }
  }
  if (values.empty()) throw PipelineError("spatial error: no valid pixels");
  out.stats = stats::summarize(values);
  return out;
}

SpatialError spatial_reprojection_error(const DepthMap& d_est, const DepthMap& d_gt,
                                        const geometry::RigCalibration& rig, geometry::Side camera,
                                        geometry::Side eye) {
  return spatial_reprojection_error(d_est, d_gt, rig.camera(camera), rig.eye(eye));
}

ErrorStats depth_mae(const DepthMap& d_est, const DepthMap& d_gt) {
  if (!d_est.same_size(d_gt)) throw ConfigError("depth MAE: depth maps differ in size");
  std::vector<double> values;
  for (int y = 0; y < d_gt.height(); ++y)
    for (int x = 0; x < d_gt.width(); ++x)
      if (d_est.valid(x, y) && d_gt.valid(x, y)) values.push_back(std::abs(d_est(x, y) - d_gt(x, y)));
  if (values.empty()) throw PipelineError("depth MAE: no valid overlap");
  return stats::summarize(values);
}

DepthMap plane_depth(int width, int height, const geometry::PlaneSpec& plane) {
  if (!(plane.distance > 0.0)) throw ConfigError("plane distance must be positive");
  return DepthMap::constant(width, height, plane.distance);
}

void RangeBins::validate() const {
  if (!(width_mm > 0.0) || !(stop_mm > start_mm) || !(start_mm >= 0.0)) throw ConfigError("invalid depth range bins");
}

std::vector<double> RangeBins::edges() const {
  validate();
  const auto n = static_cast<std::size_t>(std::ceil((stop_mm - start_mm) / width_mm - 1e-9));
  std::vector<double> e(n + 1);
  for (std::size_t i = 0; i <= n; ++i) e[i] = start_mm + width_mm * static_cast<double>(i);
  return e;
}

DepthErrorByRange depth_error_by_range(const DepthMap& d_est, const DepthMap& d_gt, const RangeBins& bins) {
  if (!d_est.same_size(d_gt)) throw ConfigError("depth by range: depth maps differ in size");
  if (d_gt.width() == 0 || d_gt.height() == 0) throw ConfigError("depth by range: empty map");
  DepthErrorByRange out;
  out.edges_mm = bins.edges();
  const std::size_t n = out.edges_mm.size() - 1;
  std::vector<double> sums(n, 0.0);
  out.counts.assign(n, 0);
  for (int y = 0; y < d_gt.height(); ++y) {
    for (int x = 0; x < d_gt.width(); ++x) {
      if (!d_est.valid(x, y) || !d_gt.valid(x, y)) continue;
      const double gt_mm = d_gt(x, y) * 1000.0;
      if (gt_mm < out.edges_mm.front() || gt_mm >= out.edges_mm.back()) continue;
      const auto bin = std::min(n - 1, static_cast<std::size_t>((gt_mm - bins.start_mm) / bins.width_mm));
      sums[bin] += std::abs(d_est(x, y) - d_gt(x, y)) * 1000.0;
      ++out.counts[bin];
    }
  }
  out.mae_mm.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.mae_mm[i] = out.counts[i] ? sums[i] / static_cast<double>(out.counts[i]) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace vstbench::metrics
