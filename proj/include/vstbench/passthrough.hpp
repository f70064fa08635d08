#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vstbench/depth_map.hpp"
#include "vstbench/geometry.hpp"
#include "vstbench/image.hpp"
#include "vstbench/scene.hpp"

namespace vstbench::passthrough {

using geometry::PixelCoord;
using geometry::PlaneSpec;
using geometry::Side;

enum class Mode { DP, GapRaw, GapSmooth, GapOversmooth };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);
bool is_gap(Mode m);
std::vector<Mode> all_modes();

struct WarpVertex {
  PixelCoord src;
  PixelCoord dst;
  double depth = 0.0;  // z in the eye frame
  bool valid = false;
};

// Regular mesh over the source image. Vertex columns sit at
// min(i * stride, width - 1), likewise for rows. Each cell splits along its
// top-left to bottom-right diagonal.
class WarpField {
 public:
  WarpField() = default;
  WarpField(int width, int height, int stride);

  int stride() const { return stride_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int source_width() const { return width_; }
  int source_height() const { return height_; }

  WarpVertex& at(int i, int j) { return vertices_[static_cast<std::size_t>(j * cols_ + i)]; }
  const WarpVertex& at(int i, int j) const { return vertices_[static_cast<std::size_t>(j * cols_ + i)]; }
  const std::vector<WarpVertex>& vertices() const { return vertices_; }

  // Piecewise-affine destination of a source position; nullopt when the
  // covering triangle has an invalid vertex or the point is off the mesh.
  std::optional<PixelCoord> evaluate(const PixelCoord& src) const;

 private:
  int width_ = 0, height_ = 0, stride_ = 1, cols_ = 0, rows_ = 0;
  std::vector<WarpVertex> vertices_;
};

inline constexpr std::uint8_t kDisoccluded = 1;
inline constexpr std::uint8_t kOutOfFrustum = 2;

struct SynthesizedView {
  ImageF image;
  WarpField warp;
  Mode mode = Mode::DP;
  Side eye = Side::Left;
  Mask mask;  // kDisoccluded | kOutOfFrustum bits
  int frame_index = 0;
};

struct MeshOptions {
  int stride = 4;
  // Triangles whose vertex depths span more than this ratio mark their
  // pixels as disoccluded.
  double disocclusion_ratio = 1.5;
};

// Planar reprojection: inverse-homography bilinear resampling of the
// same-side camera image.
SynthesizedView dp_reproject(const scene::RenderedFrame& frame, const geometry::RigCalibration& rig, Side eye,
                             const PlaneSpec& plane = {}, const MeshOptions& mesh = {});

// Depth-driven mesh reprojection with z-buffered rasterization.
SynthesizedView gap_reproject(const scene::RenderedFrame& frame, const DepthMap& d_est,
                              const geometry::RigCalibration& rig, Side eye, Mode mode = Mode::GapSmooth,
                              const MeshOptions& mesh = {});

}  // namespace vstbench::passthrough
