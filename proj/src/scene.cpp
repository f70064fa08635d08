#include "vstbench/scene.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vstbench/error.hpp"
#include "vstbench/random.hpp"

namespace vstbench::scene {

using geometry::PixelCoord;
using geometry::Pose;
using geometry::Viewpoint;

std::string to_string(TextureKind k) {
  switch (k) {
    case TextureKind::Constant: return "constant";
    case TextureKind::Checkerboard: return "checkerboard";
    case TextureKind::BlobGrid: return "blob_grid";
    case TextureKind::Noise: return "noise";
  }
  return "unknown";
}

TextureKind parse_texture_kind(const std::string& s) {
  if (s == "constant") return TextureKind::Constant;
  if (s == "checkerboard") return TextureKind::Checkerboard;
  if (s == "blob_grid") return TextureKind::BlobGrid;
  if (s == "noise") return TextureKind::Noise;
  throw ConfigError("unknown texture kind '" + s + "'");
}

void TextureSpec::validate() const {
  if (width < 2 || height < 2) throw ConfigError("texture raster must be at least 2x2");
  switch (kind) {
    case TextureKind::Checkerboard:
      if (squares < 1) throw ConfigError("checkerboard needs at least one square");
      break;
    case TextureKind::Noise:
      if (noise_cells < 1) throw ConfigError("noise needs at least one lattice cell");
      break;
    case TextureKind::BlobGrid:
      if (grid * grid < 100) throw ConfigError("blob grid needs at least 100 features");
      if (margin < 1 || border < 1 || spacing < 4 || !(blob_sigma > 0.0))
        throw ConfigError("invalid blob grid layout");
      if (width != 2 * (margin + border) + grid * spacing || height != width)
        throw ConfigError("blob grid raster size does not match its layout");
      break;
    case TextureKind::Constant: break;
  }
}

TextureSpec fiducial_texture(int grid) {
  TextureSpec t;
  t.kind = TextureKind::BlobGrid;
  t.grid = grid;
  t.low = 0.05;
  t.high = 0.95;
  t.width = t.height = 2 * (t.margin + t.border) + grid * t.spacing;
  return t;
}

namespace {

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

ImageF value_noise(const TextureSpec& spec) {
  Rng rng(spec.seed);
  auto lattice = [&](int cells) {
    Image<double> l(cells + 1, cells + 1);
    for (auto& v : l.data()) v = rng.uniform();
    return l;
  };
  const Image<double> coarse = lattice(spec.noise_cells);
  const Image<double> fine = lattice(2 * spec.noise_cells);
  auto eval = [](const Image<double>& l, double x, double y) {
    const int cells = l.width() - 1;
    x = std::clamp(x * cells, 0.0, cells - 1e-9);
    y = std::clamp(y * cells, 0.0, cells - 1e-9);
    const int ix = static_cast<int>(x), iy = static_cast<int>(y);
    const double fx = smoothstep(x - ix), fy = smoothstep(y - iy);
    const double top = (1 - fx) * l(ix, iy) + fx * l(ix + 1, iy);
    const double bot = (1 - fx) * l(ix, iy + 1) + fx * l(ix + 1, iy + 1);
    return (1 - fy) * top + fy * bot;
  };
  ImageF out(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double s = (x + 0.5) / spec.width, t = (y + 0.5) / spec.height;
      const double n = (2.0 * eval(coarse, s, t) + eval(fine, s, t)) / 3.0;
      out(x, y) = static_cast<float>(spec.low + (spec.high - spec.low) * n);
    }
  }
  return out;
}

ImageF blob_grid(const TextureSpec& spec) {
  ImageF out(spec.width, spec.height);
  const int inner0 = spec.margin + spec.border;
  const int inner1 = spec.width - inner0;  // exclusive
  const double two_sigma2 = 2.0 * spec.blob_sigma * spec.blob_sigma;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const bool in_margin = x < spec.margin || y < spec.margin || x >= spec.width - spec.margin ||
                             y >= spec.height - spec.margin;
      const bool in_inner = x >= inner0 && y >= inner0 && x < inner1 && y < inner1;
      double v;
      if (in_margin) {
        v = spec.high;
      } else if (!in_inner) {
        v = spec.low;
      } else {
        const int cx = (x - inner0) / spec.spacing, cy = (y - inner0) / spec.spacing;
        double dark = 0.0;
        for (int j = std::max(cy - 1, 0); j <= std::min(cy + 1, spec.grid - 1); ++j) {
          for (int i = std::max(cx - 1, 0); i <= std::min(cx + 1, spec.grid - 1); ++i) {
            const double fx = inner0 + spec.spacing * i + 0.5 * spec.spacing - 0.5;
            const double fy = inner0 + spec.spacing * j + 0.5 * spec.spacing - 0.5;
            const double r2 = (x - fx) * (x - fx) + (y - fy) * (y - fy);
            dark += std::exp(-r2 / two_sigma2);
          }
        }
        v = spec.high - (spec.high - spec.low) * std::min(dark, 1.0);
      }
      out(x, y) = static_cast<float>(v);
    }
  }
  return out;
}

}  // namespace

ImageF make_texture(const TextureSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case TextureKind::Constant: return ImageF(spec.width, spec.height, static_cast<float>(spec.low));
    case TextureKind::Checkerboard: {
      ImageF out(spec.width, spec.height);
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const int cx = static_cast<int>((x + 0.5) / spec.width * spec.squares);
          const int cy = static_cast<int>((y + 0.5) / spec.height * spec.squares);
          out(x, y) = static_cast<float>(((cx + cy) % 2 == 0) ? spec.high : spec.low);
        }
      }
      return out;
    }
    case TextureKind::BlobGrid: return blob_grid(spec);
    case TextureKind::Noise: return value_noise(spec);
  }
  throw ConfigError("unhandled texture kind");
}

void TexturedPatch::validate() const {
  const Eigen::Vector3d e1 = corners[1] - corners[0];
  const Eigen::Vector3d e3 = corners[3] - corners[0];
  const Eigen::Vector3d n = e1.cross(e3);
  if (!(n.norm() > 0.0)) throw ConfigError("patch " + std::to_string(id) + " is degenerate");
  const Eigen::Vector3d unit = n.normalized();
  if (std::abs((corners[2] - corners[0]).dot(unit)) > 1e-9)
    throw ConfigError("patch " + std::to_string(id) + " corners are not coplanar");
  double area = 0.0;
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d a = corners[(i + 1) % 4] - corners[i];
    const Eigen::Vector3d b = corners[(i + 2) % 4] - corners[(i + 1) % 4];
    const double c = a.cross(b).dot(unit);
    const int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) throw ConfigError("patch " + std::to_string(id) + " is not convex");
    sign = s;
  }
  area = 0.5 * ((corners[2] - corners[0]).cross(corners[3] - corners[1])).norm();
  if (!(area > 1e-6)) throw ConfigError("patch " + std::to_string(id) + " area too small");
  texture.validate();
}

TexturedPatch make_rect(int id, const Point3& center, double w, double h, double yaw, TextureSpec tex) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
  TexturedPatch p;
  p.id = id;
  p.texture = std::move(tex);
  const std::array<Eigen::Vector3d, 4> local = {Eigen::Vector3d(-w / 2, -h / 2, 0), Eigen::Vector3d(w / 2, -h / 2, 0),
                                                Eigen::Vector3d(w / 2, h / 2, 0), Eigen::Vector3d(-w / 2, h / 2, 0)};
  for (int i = 0; i < 4; ++i) p.corners[i] = center + r * local[i];
  return p;
}

std::vector<PixelCoord> FiducialTarget::features() const {
  const auto& t = patch.texture;
  std::vector<PixelCoord> out;
  out.reserve(static_cast<std::size_t>(t.grid * t.grid));
  const double first = t.margin + t.border + 0.5 * t.spacing - 0.5;
  for (int j = 0; j < t.grid; ++j)
    for (int i = 0; i < t.grid; ++i) out.push_back({first + t.spacing * i, first + t.spacing * j});
  return out;
}

std::array<PixelCoord, 4> FiducialTarget::border_corners() const {
  const auto& t = patch.texture;
  const double lo = t.margin - 0.5;
  const double hi = t.width - t.margin - 0.5;
  return {PixelCoord{lo, lo}, PixelCoord{hi, lo}, PixelCoord{hi, hi}, PixelCoord{lo, hi}};
}

Scene::Scene(std::string name, std::vector<TexturedPatch> patches, std::vector<FiducialTarget> targets,
             double background_depth, std::uint64_t seed, double background_intensity)
    : name_(std::move(name)),
      patches_(std::move(patches)),
      targets_(std::move(targets)),
      background_depth_(background_depth),
      seed_(seed),
      background_intensity_(background_intensity) {
  if (!(background_depth_ > 0.0) || !std::isfinite(background_depth_))
    throw ConfigError("background depth must be positive and finite");
  auto add = [&](const TexturedPatch& p) {
    p.validate();
    Surface s;
    s.id = p.id;
    s.origin = p.corners[0];
    s.axis_u = (p.corners[1] - p.corners[0]).normalized();
    s.normal = (p.corners[1] - p.corners[0]).cross(p.corners[3] - p.corners[0]).normalized();
    s.axis_v = s.normal.cross(s.axis_u);
    std::array<PixelCoord, 4> unit = {PixelCoord{0, 0}, PixelCoord{1, 0}, PixelCoord{1, 1}, PixelCoord{0, 1}};
    std::array<PixelCoord, 4> plane;
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector3d d = p.corners[i] - s.origin;
      plane[i] = {d.dot(s.axis_u), d.dot(s.axis_v)};
    }
    s.tex_to_plane = geometry::four_point_homography(unit, plane).matrix();
    s.plane_to_tex = s.tex_to_plane.inverse();
    TextureSpec spec = p.texture;
    if (spec.kind == TextureKind::Noise && spec.seed == 0) spec.seed = mix_seed(seed_, static_cast<std::uint64_t>(p.id));
    s.texture = make_texture(spec);
    surfaces_.push_back(std::move(s));
  };
  for (const auto& p : patches_) add(p);
  for (const auto& t : targets_) {
    if (t.patch.texture.kind != TextureKind::BlobGrid) throw ConfigError("fiducial targets need a blob_grid texture");
    add(t.patch);
  }
}

Point3 Scene::surface_point(std::size_t surface, double s, double t) const {
  const Surface& sf = surfaces_.at(surface);
  const Eigen::Vector3d h = sf.tex_to_plane * Eigen::Vector3d(s, t, 1.0);
  return sf.origin + sf.axis_u * (h.x() / h.z()) + sf.axis_v * (h.y() / h.z());
}

Point3 Scene::target_point(std::size_t target, const PixelCoord& texel) const {
  const auto& tex = targets_.at(target).patch.texture;
  return surface_point(patches_.size() + target, (texel.u + 0.5) / tex.width, (texel.v + 0.5) / tex.height);
}

const ImageF& Scene::target_reference(std::size_t target) const {
  return surfaces_.at(patches_.size() + target).texture;
}

namespace {

struct LocalSurface {
  Eigen::Vector3d origin, axis_u, axis_v, normal;
  double offset;  // normal . origin
  const Scene::Surface* src;
};

std::vector<LocalSurface> to_camera(const Scene& scene, const Pose& cam_to_world) {
  const Pose world_to_cam = cam_to_world.inverse();
  std::vector<LocalSurface> out;
  out.reserve(scene.surfaces().size());
  for (const auto& s : scene.surfaces()) {
    LocalSurface l;
    l.origin = world_to_cam.apply(s.origin);
    l.axis_u = world_to_cam.rotation * s.axis_u;
    l.axis_v = world_to_cam.rotation * s.axis_v;
    l.normal = world_to_cam.rotation * s.normal;
    l.offset = l.normal.dot(l.origin);
    l.src = &s;
    out.push_back(l);
  }
  return out;
}

struct Hit {
  double z = std::numeric_limits<double>::infinity();
  const LocalSurface* surface = nullptr;
  double s = 0.0, t = 0.0;
};

Hit intersect(const std::vector<LocalSurface>& surfaces, const Eigen::Vector3d& dir) {
  Hit best;
  for (const auto& l : surfaces) {
    const double denom = l.normal.dot(dir);
    if (std::abs(denom) < 1e-12) continue;
    const double z = l.offset / denom;  // dir.z() == 1, so the ray parameter is z-depth
    if (!(z > 1e-6) || z >= best.z) continue;
    const Eigen::Vector3d rel = z * dir - l.origin;
    const Eigen::Vector3d h = l.src->plane_to_tex * Eigen::Vector3d(rel.dot(l.axis_u), rel.dot(l.axis_v), 1.0);
    const double s = h.x() / h.z(), t = h.y() / h.z();
    constexpr double eps = 1e-12;
    if (s < -eps || t < -eps || s > 1.0 + eps || t > 1.0 + eps) continue;
    best = Hit{z, &l, s, t};
  }
  return best;
}

double shade(const Scene& scene, const Hit& hit) {
  if (!hit.surface) return scene.background_intensity();
  const ImageF& tex = hit.surface->src->texture;
  return sample_bilinear_clamped(tex, hit.s * tex.width() - 0.5, hit.t * tex.height() - 0.5);
}

Eigen::Vector3d pixel_ray(const geometry::CameraIntrinsics& k, double u, double v) {
  return {(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0};
}

}  // namespace

DepthMap raycast_depth(const Scene& scene, const Viewpoint& viewpoint) {
  const auto& k = viewpoint.intrinsics;
  k.validate();
  const auto surfaces = to_camera(scene, viewpoint.pose);
  DepthMap out(k.width, k.height);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      const Hit hit = intersect(surfaces, pixel_ray(k, x, y));
      out.set(x, y, hit.surface ? hit.z : scene.background_depth());
    }
  }
  return out;
}

RenderedFrame render(const Scene& scene, const Viewpoint& viewpoint, const RenderOptions& opts) {
  const auto& k = viewpoint.intrinsics;
  k.validate();
  if (opts.supersample < 1) throw ConfigError("supersample must be >= 1");
  const auto surfaces = to_camera(scene, viewpoint.pose);
  RenderedFrame f;
  f.image = ImageF(k.width, k.height);
  f.depth = DepthMap(k.width, k.height);
  f.pose = viewpoint.pose;
  const int n = opts.supersample;
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      const Hit center = intersect(surfaces, pixel_ray(k, x, y));
      f.depth.set(x, y, center.surface ? center.z : scene.background_depth());
      if (n == 1) {
        f.image(x, y) = static_cast<float>(shade(scene, center));
        continue;
      }
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          acc += shade(scene, intersect(surfaces, pixel_ray(k, x + (i + 0.5) / n - 0.5, y + (j + 0.5) / n - 0.5)));
      f.image(x, y) = static_cast<float>(acc / (n * n));
    }
  }
  return f;
}

std::vector<StereoFrame> animate_rig(const Scene& scene, const geometry::RigCalibration& rig,
                                     const std::vector<Pose>& trajectory, const RenderOptions& opts) {
  std::vector<StereoFrame> out;
  out.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    StereoFrame sf{render(scene, geometry::place(rig.left_camera, trajectory[i]), opts),
                   render(scene, geometry::place(rig.right_camera, trajectory[i]), opts)};
    sf.left.viewpoint = "left_camera";
    sf.right.viewpoint = "right_camera";
    sf.left.frame_index = sf.right.frame_index = static_cast<int>(i);
    out.push_back(std::move(sf));
  }
  return out;
}

std::vector<Pose> make_trajectory(const TrajectorySpec& spec) {
  if (spec.frames < 1) throw ConfigError("trajectory needs at least one pose");
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(spec.frames));
  constexpr double deg = std::numbers::pi / 180.0;
  for (int i = 0; i < spec.frames; ++i) {
    if (spec.is_static) {
      out.emplace_back();
      continue;
    }
    const double phase = 2.0 * std::numbers::pi * i / spec.frames;
    const Eigen::Vector3d t(spec.sway_x * std::sin(phase), spec.sway_y * std::sin(2.0 * phase),
                            spec.sway_z * std::sin(phase) * std::cos(phase));
    out.push_back(Pose::from_euler(spec.yaw_deg * deg * std::sin(phase), spec.pitch_deg * deg * std::sin(2.0 * phase),
                                   0.0, t));
  }
  return out;
}

std::vector<std::string> suite_names() { return {"plane", "two_plane", "clutter", "fiducial"}; }

namespace {

TextureSpec noise_tex(double low, double high, int cells = 16) {
  TextureSpec t;
  t.kind = TextureKind::Noise;
  t.low = low;
  t.high = high;
  t.noise_cells = cells;
  return t;
}

TextureSpec checker_tex(int squares) {
  TextureSpec t;
  t.kind = TextureKind::Checkerboard;
  t.squares = squares;
  return t;
}

}  // namespace

Scene make_suite_scene(const std::string& name, const geometry::RigCalibration& rig, std::uint64_t seed) {
  // Scene depths below are quoted in camera depth; cameras sit forward of
  // the rig origin.
  const double fz = rig.left_camera.pose.translation.z();
  if (name == "plane") {
    return Scene(name, {make_rect(1, {0, 0, 2.0 + fz}, 8.0, 6.0, 0.0, noise_tex(0.15, 0.85))}, {}, 10.0, seed);
  }
  if (name == "two_plane") {
    return Scene(name,
                 {make_rect(1, {0, 0, 3.0 + fz}, 10.0, 8.0, 0.0, noise_tex(0.2, 0.8)),
                  make_rect(2, {0, 0, 0.7 + fz}, 0.3, 0.24, 0.0, checker_tex(6))},
                 {}, 10.0, seed);
  }
  if (name == "clutter") {
    std::vector<TexturedPatch> p;
    p.push_back(make_rect(1, {0, 0, 4.0 + fz}, 12.0, 8.0, 0.0, noise_tex(0.2, 0.8)));
    TexturedPatch floor;
    floor.id = 2;
    floor.corners = {Point3(-3.0, 0.7, 4.0 + fz), Point3(3.0, 0.7, 4.0 + fz), Point3(3.0, 0.7, 0.5 + fz),
                     Point3(-3.0, 0.7, 0.5 + fz)};
    floor.texture = noise_tex(0.3, 0.7, 24);
    p.push_back(floor);
    TexturedPatch left_wall;
    left_wall.id = 3;
    left_wall.corners = {Point3(-1.6, -1.5, 0.5 + fz), Point3(-1.6, -1.5, 4.0 + fz), Point3(-1.6, 0.7, 4.0 + fz),
                         Point3(-1.6, 0.7, 0.5 + fz)};
    left_wall.texture = noise_tex(0.25, 0.75);
    p.push_back(left_wall);
    TexturedPatch right_wall = left_wall;
    right_wall.id = 4;
    for (auto& c : right_wall.corners) c.x() = 1.6;
    std::swap(right_wall.corners[0], right_wall.corners[1]);
    std::swap(right_wall.corners[2], right_wall.corners[3]);
    p.push_back(right_wall);
    Rng rng(mix_seed(seed, 0xC1u));
    for (int i = 0; i < 8; ++i) {
      const double z = rng.uniform(0.5, 3.5);
      const double x = rng.uniform(-0.5, 0.5) * z * 0.8;
      const double y = rng.uniform(-0.4, 0.3) * z * 0.5;
      const double w = rng.uniform(0.15, 0.5);
      const double h = rng.uniform(0.15, 0.5);
      const double yaw = rng.uniform(-0.7, 0.7);
      TextureSpec tex = (i % 2 == 0) ? checker_tex(4 + static_cast<int>(rng.below(5))) : noise_tex(0.1, 0.9, 8);
      p.push_back(make_rect(10 + i, {x, y, z + fz}, w, h, yaw, tex));
    }
    return Scene(name, std::move(p), {}, 10.0, seed);
  }
  if (name == "fiducial") {
    FiducialTarget target{make_rect(100, {0, 0, 1.0 + fz}, 0.5, 0.5, 0.0, fiducial_texture())};
    TextureSpec post;
    post.kind = TextureKind::Constant;
    post.low = 0.95;
    return Scene(name,
                 {make_rect(1, {0, 0, 3.0 + fz}, 10.0, 8.0, 0.0, noise_tex(0.55, 0.9)),
                  make_rect(2, {0, 0, 0.18 + fz}, 0.01, 0.05, 0.0, post)},
                 {target}, 10.0, seed);
  }
  throw ConfigError("unknown suite scene '" + name + "'");
}

std::vector<Scene> make_default_suite(const geometry::RigCalibration& rig, std::uint64_t seed) {
  std::vector<Scene> out;
  for (const auto& n : suite_names()) out.push_back(make_suite_scene(n, rig, seed));
  return out;
}

}  // namespace vstbench::scene
