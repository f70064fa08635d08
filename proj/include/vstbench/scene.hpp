#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vstbench/depth_map.hpp"
#include "vstbench/geometry.hpp"
#include "vstbench/image.hpp"

namespace vstbench::scene {

using geometry::Point3;

enum class TextureKind { Constant, Checkerboard, BlobGrid, Noise };

std::string to_string(TextureKind k);
TextureKind parse_texture_kind(const std::string& s);

// Procedural texture, realized as a raster sampled bilinearly. Texel
// centers are at integer texel coordinates; patch coordinate s in [0, 1]
// maps to texel x = s * width - 0.5.
struct TextureSpec {
  TextureKind kind = TextureKind::Noise;
  int width = 256;
  int height = 256;
  double low = 0.2;
  double high = 0.8;
  // Checkerboard: squares along each axis.
  int squares = 8;
  // Noise: lattice cells along each axis; 0 derives a seed from the scene.
  int noise_cells = 16;
  std::uint64_t seed = 0;
  // Blob grid: light quiet zone, dark border, then a grid of dark Gaussian
  // spots on a light field. All in texels.
  int grid = 12;
  int margin = 8;
  int border = 16;
  int spacing = 16;
  double blob_sigma = 1.5;

  void validate() const;
};

// Texture spec for a G x G blob-grid fiducial; the raster size follows
// from the layout.
TextureSpec fiducial_texture(int grid = 12);

struct TexturedPatch {
  int id = 0;
  // Top-left, top-right, bottom-right, bottom-left as seen from the front.
  // Corner i carries texture coordinate (0,0), (1,0), (1,1), (0,1).
  std::array<Point3, 4> corners;
  TextureSpec texture;

  // Coplanarity within 1e-9 m, convexity, area > 1e-6 m^2.
  void validate() const;
};

// Axis-aligned rectangle of size w x h centered at `center`, rotated by
// `yaw` about the vertical axis through the center.
TexturedPatch make_rect(int id, const Point3& center, double w, double h, double yaw, TextureSpec tex);

struct FiducialTarget {
  TexturedPatch patch;

  int grid() const { return patch.texture.grid; }
  // Blob centers in reference-texel coordinates, row-major.
  std::vector<geometry::PixelCoord> features() const;
  // Outer corners of the dark border in reference-texel coordinates,
  // ordered like the patch corners.
  std::array<geometry::PixelCoord, 4> border_corners() const;
};

ImageF make_texture(const TextureSpec& spec);

struct RenderedFrame {
  ImageF image;
  DepthMap depth;
  std::string viewpoint;
  int frame_index = 0;
  geometry::Pose pose;
};

struct RenderOptions {
  // n x n intensity samples per pixel; depth is always taken at the center.
  int supersample = 1;
};

// Immutable scene. Texture rasters and patch plane frames are built at
// construction.
class Scene {
 public:
  Scene(std::string name, std::vector<TexturedPatch> patches, std::vector<FiducialTarget> targets,
        double background_depth = 10.0, std::uint64_t seed = 0, double background_intensity = 0.5);

  const std::string& name() const { return name_; }
  const std::vector<TexturedPatch>& patches() const { return patches_; }
  const std::vector<FiducialTarget>& targets() const { return targets_; }
  double background_depth() const { return background_depth_; }
  double background_intensity() const { return background_intensity_; }
  std::uint64_t seed() const { return seed_; }

  // Texture coordinate (s,t) of a patch to world point.
  Point3 surface_point(std::size_t surface, double s, double t) const;
  // World position of a target's texel coordinate.
  Point3 target_point(std::size_t target, const geometry::PixelCoord& texel) const;
  const ImageF& target_reference(std::size_t target) const;

  struct Surface {
    int id = 0;
    Point3 origin;
    Eigen::Vector3d axis_u, axis_v, normal;
    Eigen::Matrix3d plane_to_tex;  // plane 2-D coords -> (s, t), projective
    Eigen::Matrix3d tex_to_plane;
    ImageF texture;
  };
  // Patches followed by targets.
  const std::vector<Surface>& surfaces() const { return surfaces_; }

 private:
  std::string name_;
  std::vector<TexturedPatch> patches_;
  std::vector<FiducialTarget> targets_;
  double background_depth_;
  std::uint64_t seed_;
  double background_intensity_;
  std::vector<Surface> surfaces_;
};

// Per-pixel z-depth of the nearest surface; background depth on misses.
DepthMap raycast_depth(const Scene& scene, const geometry::Viewpoint& viewpoint);

RenderedFrame render(const Scene& scene, const geometry::Viewpoint& viewpoint, const RenderOptions& opts = {});

struct StereoFrame {
  RenderedFrame left;
  RenderedFrame right;
};

// One stereo camera pair per rig pose (rig -> world).
std::vector<StereoFrame> animate_rig(const Scene& scene, const geometry::RigCalibration& rig,
                                     const std::vector<geometry::Pose>& trajectory,
                                     const RenderOptions& opts = {});

struct TrajectorySpec {
  int frames = 45;
  double sway_x = 0.01;     // m
  double sway_y = 0.005;    // m
  double sway_z = 0.005;    // m
  double yaw_deg = 1.0;
  double pitch_deg = 0.5;
  bool is_static = false;
};

// Head-sway surrogate: small sinusoidal translation and rotation. Frame 0
// is the identity pose.
std::vector<geometry::Pose> make_trajectory(const TrajectorySpec& spec = {});

// Benchmark suite: plane, two_plane, clutter, fiducial.
std::vector<std::string> suite_names();
Scene make_suite_scene(const std::string& name, const geometry::RigCalibration& rig, std::uint64_t seed);
std::vector<Scene> make_default_suite(const geometry::RigCalibration& rig, std::uint64_t seed);

}  // namespace vstbench::scene
