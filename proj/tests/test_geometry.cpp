#include "doctest.h"

#include <cmath>

#include "vstbench/error.hpp"
#include "vstbench/geometry.hpp"
#include "vstbench/random.hpp"

using namespace vstbench;
using namespace vstbench::geometry;

namespace {

CameraIntrinsics intrinsics(double fx, double fy, double cx, double cy) {
  CameraIntrinsics k;
  k.fx = fx;
  k.fy = fy;
  k.cx = cx;
  k.cy = cy;
  return k;
}

Viewpoint at(const Eigen::Vector3d& t, const Eigen::Matrix3d& r = Eigen::Matrix3d::Identity()) {
  return Viewpoint{Pose{r, t}, CameraIntrinsics{}};
}

// Independent reprojection: world point from the source ray, then pinhole
// projection, all written out by hand.
PixelCoord hand_reproject(const PixelCoord& p, double d, const Viewpoint& src, const Viewpoint& dst) {
  const auto& ks = src.intrinsics;
  const Eigen::Vector3d local((p.u - ks.cx) / ks.fx * d, (p.v - ks.cy) / ks.fy * d, d);
  const Eigen::Vector3d world = src.pose.rotation * local + src.pose.translation;
  const Eigen::Vector3d q = dst.pose.rotation.transpose() * (world - dst.pose.translation);
  const auto& kd = dst.intrinsics;
  return {kd.fx * q.x() / q.z() + kd.cx, kd.fy * q.y() / q.z() + kd.cy};
}

}  // namespace

TEST_CASE("project pinhole arithmetic") {
  auto k = intrinsics(500, 500, 320, 320);
  auto a = project({0, 0, 1}, k);
  CHECK(a.u == doctest::Approx(320));
  CHECK(a.v == doctest::Approx(320));
  auto b = project({0.1, 0, 1}, k);
  CHECK(b.u == doctest::Approx(370));
  CHECK(b.v == doctest::Approx(320));
  auto c = project({0.1, 0.2, 2}, intrinsics(600, 600, 320, 240));
  CHECK(c.u == doctest::Approx(350));
  CHECK(c.v == doctest::Approx(300));
  CHECK_THROWS_AS(project({0, 0, -1}, k), GeometryError);
  CHECK_THROWS_AS(project({0, 0, 0}, k), GeometryError);
}

TEST_CASE("unproject inverts project") {
  auto k = intrinsics(500, 500, 320, 320);
  auto p = unproject({320, 320}, 1.0, k);
  CHECK(p.isApprox(Eigen::Vector3d(0, 0, 1)));
  auto q = unproject({370, 320}, 1.0, k);
  CHECK((q - Eigen::Vector3d(0.1, 0, 1)).norm() < 1e-12);
  CHECK_THROWS_AS(unproject({0, 0}, 0.0, k), GeometryError);

  Rng rng(11);
  CameraIntrinsics def;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    PixelCoord px{rng.uniform(-100, 740), rng.uniform(-100, 580)};
    const double d = rng.uniform(0.05, 50.0);
    auto back = project(unproject(px, d, def), def);
    worst = std::max({worst, std::abs(back.u - px.u), std::abs(back.v - px.v)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("intrinsics and pose validation") {
  CameraIntrinsics k;
  CHECK_NOTHROW(k.validate());
  k.fx = 0;
  CHECK_THROWS(k.validate());
  k = CameraIntrinsics{};
  k.width = 1;
  CHECK_THROWS(k.validate());

  Pose p;
  CHECK_NOTHROW(p.validate());
  p.rotation(0, 0) = 1.1;
  CHECK_THROWS(p.validate());
  Pose mirror;
  mirror.rotation(0, 0) = -1.0;
  CHECK_THROWS(mirror.validate());
}

TEST_CASE("pose composition and inverse") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Pose a = Pose::from_euler(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                              {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    Pose id = a.compose(a.inverse());
    CHECK((id.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(id.translation.norm() < 1e-12);
    Eigen::Vector3d x(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    Pose b = Pose::from_euler(0.2, -0.1, 0.05, {0.1, 0.2, 0.3});
    CHECK((a.compose(b).apply(x) - a.apply(b.apply(x))).norm() < 1e-12);
    // relative_pose maps source-frame coordinates into the destination frame
    Pose rel = relative_pose(a, b);
    CHECK((rel.apply(x) - b.inverse().apply(a.apply(x))).norm() < 1e-12);
  }
}

TEST_CASE("default rig layout") {
  auto rig = make_rig();
  CHECK_NOTHROW(rig.validate());
  CHECK(rig.right_eye.pose.translation.x() - rig.left_eye.pose.translation.x() == doctest::Approx(0.063));
  CHECK(rig.camera_baseline() == doctest::Approx(0.063 + 2 * 0.012));
  CHECK(rig.left_camera.pose.translation.z() == doctest::Approx(0.032));
  CHECK(rig.left_camera.intrinsics.width == 640);
  CHECK(rig.left_camera.intrinsics.height == 480);

  auto bad = rig;
  bad.right_camera = bad.left_camera;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("reproject identity and lateral disparity") {
  auto src = at({0, 0, 0});
  auto same = reproject({123.25, 77.5}, 3.3, src, src);
  REQUIRE(same);
  CHECK(same->pixel.u == doctest::Approx(123.25).epsilon(1e-12));
  CHECK(same->pixel.v == doctest::Approx(77.5).epsilon(1e-12));
  CHECK(same->depth == doctest::Approx(3.3));

  // destination 32 mm to the right of the source: content moves left by fx b / d
  auto dst = at({0.032, 0, 0});
  auto r1 = reproject({300, 200}, 1.0, src, dst);
  REQUIRE(r1);
  CHECK(r1->pixel.u == doctest::Approx(300 - 16.0));
  CHECK(r1->pixel.v == doctest::Approx(200));
  auto r2 = reproject({300, 200}, 2.0, src, dst);
  REQUIRE(r2);
  CHECK(r2->pixel.u == doctest::Approx(300 - 8.0));

  // behind the destination
  auto far_ahead = at({0, 0, 5});
  CHECK_FALSE(reproject({319.5, 239.5}, 1.0, src, far_ahead));
}

TEST_CASE("reproject matches a hand-written oracle on rotated viewpoints") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    auto src = at({rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)},
                  Pose::from_euler(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), {})
                      .rotation);
    auto dst = at({rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)},
                  Pose::from_euler(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), {})
                      .rotation);
    PixelCoord p{rng.uniform(0, 639), rng.uniform(0, 479)};
    const double d = rng.uniform(0.5, 8.0);
    auto got = reproject(p, d, src, dst);
    REQUIRE(got);
    auto want = hand_reproject(p, d, src, dst);
    CHECK(std::abs(got->pixel.u - want.u) < 1e-9);
    CHECK(std::abs(got->pixel.v - want.v) < 1e-9);
  }
}

TEST_CASE("camera to eye and back returns the start pixel") {
  auto rig = make_rig();
  Rng rng(8);
  for (Side s : {Side::Left, Side::Right}) {
    for (int i = 0; i < 300; ++i) {
      PixelCoord p{rng.uniform(0, 639), rng.uniform(0, 479)};
      const double d = rng.uniform(0.3, 10.0);
      auto fwd = reproject(p, d, rig.camera(s), rig.eye(s));
      REQUIRE(fwd);
      auto back = reproject(fwd->pixel, fwd->depth, rig.eye(s), rig.camera(s));
      REQUIRE(back);
      CHECK(std::abs(back->pixel.u - p.u) < 1e-6);
      CHECK(std::abs(back->pixel.v - p.v) < 1e-6);
    }
  }
}

TEST_CASE("homography basics") {
  Eigen::Matrix3d m;
  m << 2, 0.1, 5, -0.2, 1.5, 3, 1e-4, 2e-4, 2;
  Homography h(m);
  CHECK(h.matrix()(2, 2) == doctest::Approx(1.0));
  auto inv = h.inverse();
  PixelCoord p{100, 50};
  auto q = inv.apply(h.apply(p));
  CHECK(q.u == doctest::Approx(100).epsilon(1e-12));
  CHECK(q.v == doctest::Approx(50).epsilon(1e-12));
  auto composed = (inv * h).apply(p);
  CHECK(composed.u == doctest::Approx(100).epsilon(1e-12));

  Eigen::Matrix3d singular = Eigen::Matrix3d::Zero();
  singular(2, 2) = 1;
  CHECK_THROWS_AS(Homography{singular}, GeometryError);
  Eigen::Matrix3d zero_corner = Eigen::Matrix3d::Identity();
  zero_corner(2, 2) = 0;
  CHECK_THROWS_AS(Homography{zero_corner}, GeometryError);

  Eigen::Matrix3d proj = Eigen::Matrix3d::Identity();
  proj(2, 0) = 0.01;
  Homography hp(proj);
  PixelCoord out;
  CHECK_FALSE(hp.try_apply({-100, 0}, out));
}

TEST_CASE("four point homography") {
  std::array<PixelCoord, 4> from = {{{0, 0}, {100, 0}, {100, 100}, {0, 100}}};
  std::array<PixelCoord, 4> to = {{{10, 20}, {130, 15}, {120, 140}, {5, 110}}};
  auto h = four_point_homography(from, to);
  for (int i = 0; i < 4; ++i) {
    auto q = h.apply(from[i]);
    CHECK(std::abs(q.u - to[i].u) < 1e-9);
    CHECK(std::abs(q.v - to[i].v) < 1e-9);
  }
  std::array<PixelCoord, 4> collinear = {{{0, 0}, {1, 1}, {2, 2}, {0, 5}}};
  CHECK_THROWS_AS(four_point_homography(collinear, to), GeometryError);
}

TEST_CASE("plane homography") {
  auto src = at({0, 0, 0});
  auto id = plane_homography(src, src, {2.0});
  CHECK((id.matrix() - Eigen::Matrix3d::Identity()).norm() < 1e-12);

  auto shifted = plane_homography(src, at({0.03, 0, 0}), {2.0});
  for (PixelCoord p : {PixelCoord{0, 0}, PixelCoord{319.5, 239.5}, PixelCoord{639, 479}}) {
    auto q = shifted.apply(p);
    CHECK(q.u == doctest::Approx(p.u - 7.5));
    CHECK(q.v == doctest::Approx(p.v));
  }

  // 10 degrees of relative yaw plus an offset: agreement with reprojection at
  // the plane depth
  auto rotated = at({0.05, -0.01, 0.02}, Pose::from_euler(10.0 * M_PI / 180.0, 0, 0, {}).rotation);
  auto h = plane_homography(src, rotated, {2.0});
  double worst = 0.0;
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) {
      PixelCoord p{i * 159.75, j * 119.75};
      auto want = reproject(p, 2.0, src, rotated);
      REQUIRE(want);
      auto got = h.apply(p);
      worst = std::max({worst, std::abs(got.u - want->pixel.u), std::abs(got.v - want->pixel.v)});
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("rig plane homography agrees with reproject_pixel on a dense grid") {
  auto rig = make_rig();
  rig.right_camera.pose.rotation = Pose::from_euler(0.05, -0.03, 0.02, {}).rotation;
  for (Side cam : {Side::Left, Side::Right})
    for (Side eye : {Side::Left, Side::Right}) {
      for (double dist : {0.7, 2.0, 5.0}) {
        auto h = plane_homography(rig, cam, eye, {dist});
        double worst = 0.0;
        for (int v = 0; v < 480; v += 16)
          for (int u = 0; u < 640; u += 16) {
            auto want = reproject_pixel({double(u), double(v)}, dist, cam, eye, rig);
            REQUIRE(want);
            auto got = h.apply({double(u), double(v)});
            worst = std::max({worst, std::abs(got.u - want->u), std::abs(got.v - want->v)});
          }
        CHECK(worst < 1e-6);
      }
    }
}
