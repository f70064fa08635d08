#include "vstbench/passthrough.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vstbench/error.hpp"

namespace vstbench::passthrough {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::DP: return "dp";
    case Mode::GapRaw: return "gap-raw";
    case Mode::GapSmooth: return "gap-smooth";
    case Mode::GapOversmooth: return "gap-oversmooth";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : all_modes())
    if (to_string(m) == s) return m;
  throw ConfigError("unknown passthrough mode '" + s + "' (expected dp, gap-raw, gap-smooth, gap-oversmooth)");
}

bool is_gap(Mode m) { return m != Mode::DP; }

std::vector<Mode> all_modes() { return {Mode::DP, Mode::GapRaw, Mode::GapSmooth, Mode::GapOversmooth}; }

WarpField::WarpField(int width, int height, int stride) : width_(width), height_(height), stride_(stride) {
  if (stride < 1) throw ConfigError("mesh stride must be >= 1");
  if (width < 2 || height < 2) throw ConfigError("mesh needs at least a 2x2 image");
  cols_ = (width - 1 + stride - 1) / stride + 1;
  rows_ = (height - 1 + stride - 1) / stride + 1;
  vertices_.resize(static_cast<std::size_t>(cols_ * rows_));
  for (int j = 0; j < rows_; ++j)
    for (int i = 0; i < cols_; ++i)
      at(i, j).src = {static_cast<double>(std::min(i * stride, width - 1)),
                      static_cast<double>(std::min(j * stride, height - 1))};
}

std::optional<PixelCoord> WarpField::evaluate(const PixelCoord& src) const {
  if (src.u < 0.0 || src.v < 0.0 || src.u > width_ - 1 || src.v > height_ - 1) return std::nullopt;
  const int i = std::min(static_cast<int>(src.u / stride_), cols_ - 2);
  const int j = std::min(static_cast<int>(src.v / stride_), rows_ - 2);
  const WarpVertex& v00 = at(i, j);
  const WarpVertex& v10 = at(i + 1, j);
  const WarpVertex& v01 = at(i, j + 1);
  const WarpVertex& v11 = at(i + 1, j + 1);
  const double cw = v10.src.u - v00.src.u, ch = v01.src.v - v00.src.v;
  const double a = (src.u - v00.src.u) / cw, b = (src.v - v00.src.v) / ch;
  // Upper triangle (v00, v10, v11) when a >= b.
  const WarpVertex& mid = a >= b ? v10 : v01;
  if (!v00.valid || !v11.valid || !mid.valid) return std::nullopt;
  double w0, w1, w2;  // weights of v00, mid, v11
  if (a >= b) {
    w0 = 1.0 - a;
    w1 = a - b;
    w2 = b;
  } else {
    w0 = 1.0 - b;
    w1 = b - a;
    w2 = a;
  }
  return PixelCoord{w0 * v00.dst.u + w1 * mid.dst.u + w2 * v11.dst.u,
                    w0 * v00.dst.v + w1 * mid.dst.v + w2 * v11.dst.v};
}

SynthesizedView dp_reproject(const scene::RenderedFrame& frame, const geometry::RigCalibration& rig, Side eye,
                             const PlaneSpec& plane, const MeshOptions& mesh) {
  const auto& cam = rig.camera(eye);
  const auto& eye_vp = rig.eye(eye);
  if (frame.image.width() != cam.intrinsics.width || frame.image.height() != cam.intrinsics.height)
    throw ConfigError("frame size does not match camera intrinsics");
  const geometry::Homography h = geometry::plane_homography(cam, eye_vp, plane);
  const geometry::Homography h_inv = h.inverse();

  SynthesizedView view;
  view.mode = Mode::DP;
  view.eye = eye;
  view.frame_index = frame.frame_index;
  const int w = eye_vp.intrinsics.width, ht = eye_vp.intrinsics.height;
  view.image = ImageF(w, ht);
  view.mask = Mask(w, ht);
  for (int y = 0; y < ht; ++y) {
    for (int x = 0; x < w; ++x) {
      PixelCoord src;
      double v = 0.0;
      if (h_inv.try_apply({static_cast<double>(x), static_cast<double>(y)}, src) &&
          sample_bilinear(frame.image, src.u, src.v, v)) {
        view.image(x, y) = static_cast<float>(v);
      } else {
        view.mask(x, y) = kOutOfFrustum;
      }
    }
  }

  view.warp = WarpField(frame.image.width(), frame.image.height(), mesh.stride);
  const geometry::Pose rel = geometry::relative_pose(cam.pose, eye_vp.pose);
  for (int j = 0; j < view.warp.rows(); ++j) {
    for (int i = 0; i < view.warp.cols(); ++i) {
      WarpVertex& vx = view.warp.at(i, j);
      const geometry::Point3 p = rel.apply(geometry::unproject(vx.src, plane.distance, cam.intrinsics));
      if (!(p.z() > 0.0)) continue;
      vx.valid = h.try_apply(vx.src, vx.dst);
      vx.depth = p.z();
    }
  }
  return view;
}

namespace {

struct RasterTarget {
  ImageF* image;
  Mask* mask;
  Image<double>* zbuf;
};

void raster_triangle(const WarpVertex& a, const WarpVertex& b, const WarpVertex& c, bool disoccluded,
                     const ImageF& src_image, RasterTarget& out) {
  const double area = (b.dst.u - a.dst.u) * (c.dst.v - a.dst.v) - (c.dst.u - a.dst.u) * (b.dst.v - a.dst.v);
  if (std::abs(area) < 1e-12) return;
  constexpr double eps = 1e-9;
  const int w = out.image->width(), h = out.image->height();
  const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({a.dst.u, b.dst.u, c.dst.u}) - eps)));
  const int x1 = std::min(w - 1, static_cast<int>(std::floor(std::max({a.dst.u, b.dst.u, c.dst.u}) + eps)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({a.dst.v, b.dst.v, c.dst.v}) - eps)));
  const int y1 = std::min(h - 1, static_cast<int>(std::floor(std::max({a.dst.v, b.dst.v, c.dst.v}) + eps)));
  const double inv_area = 1.0 / area;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double la = ((b.dst.u - x) * (c.dst.v - y) - (c.dst.u - x) * (b.dst.v - y)) * inv_area;
      const double lb = ((c.dst.u - x) * (a.dst.v - y) - (a.dst.u - x) * (c.dst.v - y)) * inv_area;
      const double lc = 1.0 - la - lb;
      if (la < -eps || lb < -eps || lc < -eps) continue;
      const double z = 1.0 / (la / a.depth + lb / b.depth + lc / c.depth);
      double& zb = (*out.zbuf)(x, y);
      if (!(z < zb)) continue;
      zb = z;
      const double su = la * a.src.u + lb * b.src.u + lc * c.src.u;
      const double sv = la * a.src.v + lb * b.src.v + lc * c.src.v;
      (*out.image)(x, y) = static_cast<float>(sample_bilinear_clamped(src_image, su, sv));
      (*out.mask)(x, y) = disoccluded ? kDisoccluded : 0;
    }
  }
}

}  // namespace

SynthesizedView gap_reproject(const scene::RenderedFrame& frame, const DepthMap& d_est,
                              const geometry::RigCalibration& rig, Side eye, Mode mode, const MeshOptions& mesh) {
  if (d_est.width() != frame.image.width() || d_est.height() != frame.image.height())
    throw ConfigError("estimated depth size does not match the camera frame");
  if (!(mesh.disocclusion_ratio > 1.0)) throw ConfigError("disocclusion ratio must exceed 1");
  const auto& cam = rig.camera(eye);
  const auto& eye_vp = rig.eye(eye);

  SynthesizedView view;
  view.mode = mode;
  view.eye = eye;
  view.frame_index = frame.frame_index;
  view.warp = WarpField(frame.image.width(), frame.image.height(), mesh.stride);
  Image<double> src_depth(view.warp.cols(), view.warp.rows());
  for (int j = 0; j < view.warp.rows(); ++j) {
    for (int i = 0; i < view.warp.cols(); ++i) {
      WarpVertex& vx = view.warp.at(i, j);
      const int px = static_cast<int>(vx.src.u), py = static_cast<int>(vx.src.v);
      if (!d_est.valid(px, py)) continue;
      src_depth(i, j) = d_est(px, py);
      const auto r = geometry::reproject(vx.src, d_est(px, py), cam, eye_vp);
      if (!r) continue;
      vx.dst = r->pixel;
      vx.depth = r->depth;
      vx.valid = true;
    }
  }

  const int w = eye_vp.intrinsics.width, h = eye_vp.intrinsics.height;
  view.image = ImageF(w, h);
  view.mask = Mask(w, h, kOutOfFrustum);
  Image<double> zbuf(w, h, std::numeric_limits<double>::infinity());
  RasterTarget target{&view.image, &view.mask, &zbuf};
  auto ratio_exceeds = [&](double a, double b, double c) {
    return std::max({a, b, c}) > mesh.disocclusion_ratio * std::min({a, b, c});
  };
  for (int j = 0; j + 1 < view.warp.rows(); ++j) {
    for (int i = 0; i + 1 < view.warp.cols(); ++i) {
      const WarpVertex& v00 = view.warp.at(i, j);
      const WarpVertex& v10 = view.warp.at(i + 1, j);
      const WarpVertex& v01 = view.warp.at(i, j + 1);
      const WarpVertex& v11 = view.warp.at(i + 1, j + 1);
      if (v00.valid && v10.valid && v11.valid)
        raster_triangle(v00, v10, v11, ratio_exceeds(src_depth(i, j), src_depth(i + 1, j), src_depth(i + 1, j + 1)),
                        frame.image, target);
      if (v00.valid && v11.valid && v01.valid)
        raster_triangle(v00, v11, v01, ratio_exceeds(src_depth(i, j), src_depth(i + 1, j + 1), src_depth(i, j + 1)),
                        frame.image, target);
    }
  }
  return view;
}

}  // namespace vstbench::passthrough
