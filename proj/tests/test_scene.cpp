#include "doctest.h"

#include <cmath>

#include "vstbench/error.hpp"
#include "vstbench/scene.hpp"

using namespace vstbench;
using namespace vstbench::scene;
using geometry::CameraIntrinsics;
using geometry::Pose;
using geometry::Viewpoint;

namespace {

Viewpoint origin_view() { return Viewpoint{Pose{}, CameraIntrinsics{}}; }

TextureSpec constant(double v) {
  TextureSpec t;
  t.kind = TextureKind::Constant;
  t.low = v;
  return t;
}

// Depth along the ray through pixel (u, v) to the plane n . x = c, solved by
// hand.
double ray_plane_z(const CameraIntrinsics& k, double u, double v, const Eigen::Vector3d& n, double c) {
  const Eigen::Vector3d dir((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
  return c / n.dot(dir);
}

}  // namespace

TEST_CASE("fronto-parallel patch renders constant depth") {
  Scene s("wall", {make_rect(1, {0, 0, 2.0}, 8.0, 6.0, 0.0, constant(0.5))}, {});
  auto d = raycast_depth(s, origin_view());
  CHECK(d.valid_count() == d.width() * d.height());
  double worst = 0.0;
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x) worst = std::max(worst, std::abs(d(x, y) - 2.0));
  CHECK(worst < 1e-12);
}

TEST_CASE("empty scene renders background depth") {
  Scene s("empty", {}, {});
  auto f = render(s, origin_view());
  for (int y = 0; y < f.depth.height(); y += 7)
    for (int x = 0; x < f.depth.width(); x += 7) {
      CHECK(f.depth.valid(x, y));
      CHECK(f.depth(x, y) == 10.0);
    }
}

TEST_CASE("tilted patch depth matches ray-plane intersection") {
  const double yaw = M_PI / 4;
  Scene s("tilt", {make_rect(1, {0, 0, 2.0}, 2.0, 2.0, yaw, constant(0.5))}, {});
  auto d = raycast_depth(s, origin_view());
  // plane through (0,0,2) rotated about y: normal (sin yaw, 0, cos yaw)
  const Eigen::Vector3d n(std::sin(yaw), 0.0, std::cos(yaw));
  const double c = n.dot(Eigen::Vector3d(0, 0, 2.0));
  CameraIntrinsics k;
  const int pts[10][2] = {{320, 240}, {250, 240}, {400, 100}, {200, 300}, {319, 239},
                          {280, 380}, {360, 50},  {340, 420}, {300, 200}, {380, 260}};
  for (auto& p : pts) {
    REQUIRE(d.valid(p[0], p[1]));
    CHECK(d(p[0], p[1]) == doctest::Approx(ray_plane_z(k, p[0], p[1], n, c)).epsilon(1e-10));
  }
}

TEST_CASE("patch validation") {
  auto p = make_rect(1, {0, 0, 2}, 1, 1, 0, constant(0.5));
  CHECK_NOTHROW(p.validate());
  auto warped = p;
  warped.corners[2].z() += 0.1;
  CHECK_THROWS_AS(warped.validate(), ConfigError);
  auto tiny = make_rect(1, {0, 0, 2}, 1e-4, 1e-4, 0, constant(0.5));
  CHECK_THROWS_AS(tiny.validate(), ConfigError);
  TextureSpec few = fiducial_texture(9);
  CHECK_THROWS_AS(few.validate(), ConfigError);
  CHECK_NOTHROW(fiducial_texture(10).validate());
}

TEST_CASE("checkerboard intensities follow the texture lookup") {
  TextureSpec t;
  t.kind = TextureKind::Checkerboard;
  t.squares = 4;
  t.low = 0.1;
  t.high = 0.9;
  t.width = t.height = 64;
  const double w = 1.0, h = 1.0;
  Scene s("checker", {make_rect(1, {0, 0, 2.0}, w, h, 0.0, t)}, {});
  auto f = render(s, origin_view());
  auto tex = make_texture(t);
  CameraIntrinsics k;
  for (auto [u, v] : std::initializer_list<std::pair<int, int>>{{200, 120}, {201, 121}, {320, 240}, {437, 356},
                                                                 {260, 300}, {380, 180}}) {
    // point on the patch plane, then its normalized texture coordinates
    const double x = (u - k.cx) / k.fx * 2.0, y = (v - k.cy) / k.fy * 2.0;
    const double sx = (x + w / 2) / w, sy = (y + h / 2) / h;
    const double want = sample_bilinear_clamped(tex, sx * tex.width() - 0.5, sy * tex.height() - 0.5);
    CHECK(std::abs(f.image(u, v) - want) < 1e-6);
  }
  // axis-aligned squares: a constant row inside one square
  const int v = 160;
  for (int u = 200; u < 230; ++u) CHECK(f.image(u, v) == f.image(200, v));
}

TEST_CASE("rendering is deterministic") {
  auto rig = geometry::make_rig();
  for (const auto& name : suite_names()) {
    auto a = make_suite_scene(name, rig, 9);
    auto b = make_suite_scene(name, rig, 9);
    auto fa = render(a, rig.left_camera);
    auto fb = render(b, rig.left_camera);
    CHECK(fa.image == fb.image);
    CHECK(fa.depth == fb.depth);
  }
  auto c = make_suite_scene("plane", rig, 10);
  CHECK_FALSE(render(c, rig.left_camera).image == render(make_suite_scene("plane", rig, 9), rig.left_camera).image);
}

TEST_CASE("suite scenes keep all depths positive") {
  auto rig = geometry::make_rig();
  CHECK(suite_names().size() == 4);
  CHECK_THROWS_AS(make_suite_scene("nope", rig, 1), ConfigError);
  for (const auto& s : make_default_suite(rig, 1)) {
    for (const auto& vp : {rig.left_camera, rig.right_camera}) {
      auto d = raycast_depth(s, vp);
      CHECK(d.valid_count() == d.width() * d.height());
      double lo = 1e9;
      for (double z : d.values().data()) lo = std::min(lo, z);
      CHECK(lo > 0.1);
    }
  }
}

TEST_CASE("fiducial blob centroids land on projected features") {
  auto rig = geometry::make_rig();
  auto s = make_suite_scene("fiducial", rig, 1);
  REQUIRE(s.targets().size() == 1);
  const auto& target = s.targets()[0];
  CHECK(target.grid() * target.grid() >= 100);
  const auto& k = rig.left_camera.intrinsics;
  auto trajectory = make_trajectory();
  for (int frame : {0, 22}) {
    auto vp = geometry::place(rig.left_camera, trajectory[frame]);
    auto f = render(s, vp, {2});
    const Pose to_cam = vp.pose.inverse();
    double worst = 0.0;
    int checked = 0;
    for (const auto& feat : target.features()) {
      const auto q = to_cam.apply(s.target_point(0, feat));
      auto p = geometry::project(q, k);
      const int cu = static_cast<int>(std::lround(p.u)), cv = static_cast<int>(std::lround(p.v));
      const int r = 5;
      if (cu - r < 0 || cv - r < 0 || cu + r >= k.width || cv + r >= k.height) continue;
      // skip blobs partly hidden by the occluder in front of the target
      bool occluded = false;
      for (int y = cv - r; y <= cv + r; ++y)
        for (int x = cu - r; x <= cu + r; ++x) occluded = occluded || std::abs(f.depth(x, y) - q.z()) > 0.05;
      if (occluded) continue;
      double bg = 0.0;
      for (int y = cv - r; y <= cv + r; ++y)
        for (int x = cu - r; x <= cu + r; ++x) bg = std::max<double>(bg, f.image(x, y));
      double sw = 0, su = 0, sv = 0;
      for (int y = cv - r; y <= cv + r; ++y)
        for (int x = cu - r; x <= cu + r; ++x) {
          const double w = bg - f.image(x, y);
          sw += w;
          su += w * x;
          sv += w * y;
        }
      REQUIRE(sw > 0);
      worst = std::max(worst, std::hypot(su / sw - p.u, sv / sw - p.v));
      ++checked;
    }
    CHECK(checked > 100);
    CHECK(worst < 0.25);
  }
}

TEST_CASE("trajectories") {
  TrajectorySpec one;
  one.frames = 1;
  CHECK(make_trajectory(one).size() == 1);
  auto def = make_trajectory();
  CHECK(def.size() == 45);
  for (const auto& p : def) CHECK_NOTHROW(p.validate());
  TrajectorySpec none;
  none.frames = 0;
  CHECK_THROWS_AS(make_trajectory(none), ConfigError);

  auto rig = geometry::make_rig();
  auto s = make_suite_scene("two_plane", rig, 1);
  TrajectorySpec st;
  st.frames = 3;
  st.is_static = true;
  auto frames = animate_rig(s, rig, make_trajectory(st));
  REQUIRE(frames.size() == 3);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(frames[i].left.frame_index == static_cast<int>(i));
    CHECK(frames[i].left.image == frames[0].left.image);
    CHECK(frames[i].right.depth == frames[0].right.depth);
  }
  CHECK_FALSE(frames[0].left.image == frames[0].right.image);
}
