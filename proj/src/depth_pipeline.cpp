#include "vstbench/depth_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vstbench/error.hpp"
#include "vstbench/random.hpp"

namespace vstbench::depth {

void DepthCorruptionSpec::validate() const {
  if (boundary_dilation_px < 0) throw ConfigError("boundary_dilation_px must be >= 0");
  if (!(noise_sigma_rel >= 0.0)) throw ConfigError("noise_sigma_rel must be >= 0");
  if (disparity_levels == 1 || disparity_levels < 0) throw ConfigError("disparity_levels must be >= 2 or 0");
  if (!(min_depth > 0.0) || !(max_depth > min_depth)) throw ConfigError("invalid quantization depth range");
  if (!(edge_jump > 0.0)) throw ConfigError("edge_jump must be positive");
}

DepthCorruptionSpec DepthCorruptionSpec::benchmark_default(std::uint64_t seed) {
  DepthCorruptionSpec s;
  s.boundary_dilation_px = 2;
  s.noise_sigma_rel = 0.01;
  s.disparity_levels = 128;
  s.seed = seed;
  return s;
}

void SmoothingSpec::validate() const {
  if (!(sigma_px >= 0.0) || !std::isfinite(sigma_px)) throw ConfigError("sigma_px must be >= 0");
}

int SmoothingSpec::radius() const { return static_cast<int>(std::ceil(3.0 * sigma_px)); }

namespace {

DepthMap dilate_edges(const DepthMap& in, int radius, double jump) {
  DepthMap out = in;
  const int r2 = radius * radius;
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      if (!in.valid(x, y)) continue;
      double nearest = in(x, y);
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > r2) continue;
          const int qx = x + dx, qy = y + dy;
          if (qx < 0 || qy < 0 || qx >= in.width() || qy >= in.height() || !in.valid(qx, qy)) continue;
          nearest = std::min(nearest, in(qx, qy));
        }
      }
      if (in(x, y) - nearest > jump * in(x, y)) out.set(x, y, nearest);
    }
  }
  return out;
}

}  // namespace

DepthMap corrupt_depth(const DepthMap& gt, const DepthCorruptionSpec& spec) {
  spec.validate();
  if (spec.is_identity()) return gt;
  DepthMap out = spec.boundary_dilation_px > 0 ? dilate_edges(gt, spec.boundary_dilation_px, spec.edge_jump) : gt;
  if (spec.disparity_levels >= 2) {
    const double inv_lo = 1.0 / spec.max_depth, inv_hi = 1.0 / spec.min_depth;
    const double step = (inv_hi - inv_lo) / (spec.disparity_levels - 1);
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        if (!out.valid(x, y)) continue;
        const double q = std::clamp(std::round((1.0 / out(x, y) - inv_lo) / step), 0.0,
                                    static_cast<double>(spec.disparity_levels - 1));
        out.set(x, y, 1.0 / (inv_lo + q * step));
      }
    }
  }
  if (spec.noise_sigma_rel > 0.0) {
    Rng rng(spec.seed);
    const double s = spec.noise_sigma_rel;
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        const double z = rng.normal();  // drawn for every pixel so streams align across masks
        if (out.valid(x, y)) out.set(x, y, out(x, y) * std::exp(s * z - 0.5 * s * s));
      }
    }
  }
  return out;
}

DepthMap smooth_depth(const DepthMap& d, const SmoothingSpec& spec) {
  spec.validate();
  if (spec.sigma_px == 0.0) return d;
  const int r = spec.radius();
  std::vector<double> kernel(static_cast<std::size_t>(2 * r + 1));
  for (int i = -r; i <= r; ++i) kernel[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (spec.sigma_px * spec.sigma_px));

  const int w = d.width(), h = d.height();
  Image<double> inv(w, h), wt(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (d.valid(x, y)) {
        inv(x, y) = 1.0 / d(x, y);
        wt(x, y) = 1.0;
      }

  auto pass = [&](const Image<double>& a, const Image<double>& b, bool horizontal, Image<double>& oa, Image<double>& ob) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double sa = 0.0, sb = 0.0;
        for (int i = -r; i <= r; ++i) {
          const int qx = horizontal ? x + i : x, qy = horizontal ? y : y + i;
          if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
          const double k = kernel[static_cast<std::size_t>(i + r)];
          sa += k * a(qx, qy);
          sb += k * b(qx, qy);
        }
        oa(x, y) = sa;
        ob(x, y) = sb;
      }
    }
  };
  Image<double> ta(w, h), tb(w, h), na(w, h), nb(w, h);
  pass(inv, wt, true, ta, tb);
  pass(ta, tb, false, na, nb);

  DepthMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (d.valid(x, y) && nb(x, y) > 0.0 && na(x, y) > 0.0) out.set(x, y, nb(x, y) / na(x, y));
  return out;
}

WarpedDepth warp_depth(const DepthMap& src_depth, const geometry::Viewpoint& src, const geometry::Viewpoint& dst) {
  const int w = dst.intrinsics.width, h = dst.intrinsics.height;
  if (src_depth.width() != src.intrinsics.width || src_depth.height() != src.intrinsics.height)
    throw ConfigError("depth map size does not match source intrinsics");
  Image<double> zbuf(w, h, std::numeric_limits<double>::infinity());
  for (int y = 0; y < src_depth.height(); ++y) {
    for (int x = 0; x < src_depth.width(); ++x) {
      if (!src_depth.valid(x, y)) continue;
      const auto r = geometry::reproject({static_cast<double>(x), static_cast<double>(y)}, src_depth(x, y), src, dst);
      if (!r) continue;
      const long tx = std::lround(r->pixel.u), ty = std::lround(r->pixel.v);
      if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
      double& z = zbuf(static_cast<int>(tx), static_cast<int>(ty));
      if (r->depth < z) z = r->depth;
    }
  }
  WarpedDepth out{DepthMap(w, h), Mask(w, h)};
  for (int y = 0; y < h; ++y) {
    int last = -1;  // last written column
    for (int x = 0; x < w; ++x) {
      if (!std::isfinite(zbuf(x, y))) continue;
      out.depth.set(x, y, zbuf(x, y));
      if (last >= 0 && x - last > 1) {
        const double fill = std::max(zbuf(last, y), zbuf(x, y));
        for (int i = last + 1; i < x; ++i) {
          out.depth.set(i, y, fill);
          out.filled(i, y) = 1;
        }
      }
      last = x;
    }
  }
  return out;
}

WarpedDepth warp_depth_left_to_right(const DepthMap& d_left, const geometry::RigCalibration& rig) {
  return warp_depth(d_left, rig.left_camera, rig.right_camera);
}

}  // namespace vstbench::depth
