#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "vstbench/error.hpp"

namespace vstbench::geometry {

using Point3 = Eigen::Vector3d;

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

struct CameraIntrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 319.5;
  double cy = 239.5;
  int width = 640;
  int height = 480;

  // Throws GeometryError when focal lengths or image size are degenerate.
  void validate() const;
  Eigen::Matrix3d matrix() const;
  bool contains(const PixelCoord& p) const;
};

// Rigid transform from a local frame into its parent: x_parent = R x_local + t.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate() const;
  Pose inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return rotation * x + translation; }
  // (*this) * other: first other, then this.
  Pose compose(const Pose& other) const;

  static Pose from_euler(double yaw, double pitch, double roll, const Eigen::Vector3d& t);
};

struct Viewpoint {
  Pose pose;
  CameraIntrinsics intrinsics;
};

enum class Side { Left, Right };

std::string_view to_string(Side s);
Side parse_side(std::string_view s);

// Two world-facing cameras and the two eye viewpoints of a headset, all in
// one rig frame.
struct RigCalibration {
  Viewpoint left_camera;
  Viewpoint right_camera;
  Viewpoint left_eye;
  Viewpoint right_eye;

  const Viewpoint& camera(Side s) const { return s == Side::Left ? left_camera : right_camera; }
  const Viewpoint& eye(Side s) const { return s == Side::Left ? left_eye : right_eye; }

  void validate() const;
  double camera_baseline() const;
};

// Layout parameters of the synthetic headset. Cameras sit `camera_forward`
// in front of the eyes and `camera_outward` further from the midline.
struct RigLayout {
  double eye_baseline = 0.063;
  double camera_forward = 0.032;
  double camera_outward = 0.012;
  CameraIntrinsics intrinsics{};
};

RigCalibration make_rig(const RigLayout& layout = {});

// Eyes and cameras share depth; each camera is offset `offset` meters
// outward from its eye.
RigCalibration make_lateral_rig(double offset, const CameraIntrinsics& k = {});

// Pose of a viewpoint when the rig itself sits at `rig_pose` in the world.
Viewpoint place(const Viewpoint& vp, const Pose& rig_pose);

// Transform taking points in `src` coordinates to `dst` coordinates.
Pose relative_pose(const Pose& src, const Pose& dst);

PixelCoord project(const Point3& point, const CameraIntrinsics& k);
Point3 unproject(const PixelCoord& pixel, double depth, const CameraIntrinsics& k);

struct Reprojection {
  PixelCoord pixel;
  double depth = 0.0;  // z in the destination frame
};

// Unproject in `src`, move to `dst`, project. nullopt marks a point that
// lands behind the destination viewpoint.
std::optional<Reprojection> reproject(const PixelCoord& pixel, double depth, const Viewpoint& src,
                                      const Viewpoint& dst);

std::optional<PixelCoord> reproject_pixel(const PixelCoord& pixel, double depth, Side camera, Side eye,
                                          const RigCalibration& rig);

class Homography {
 public:
  Homography() = default;
  // Normalizes so that h(2,2) == 1. Throws GeometryError when the
  // bottom-right entry vanishes or the matrix is singular.
  explicit Homography(const Eigen::Matrix3d& m);

  static Homography identity() { return Homography(Eigen::Matrix3d::Identity()); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  PixelCoord apply(const PixelCoord& p) const;
  // Returns false when the point maps to infinity.
  bool try_apply(const PixelCoord& p, PixelCoord& out) const;
  Homography inverse() const;
  Homography operator*(const Homography& rhs) const;

 private:
  Eigen::Matrix3d m_ = Eigen::Matrix3d::Identity();
};

// Exact homography taking each `from[i]` to `to[i]`. Throws GeometryError
// when three of the points are collinear.
Homography four_point_homography(const std::array<PixelCoord, 4>& from, const std::array<PixelCoord, 4>& to);

// Fronto-parallel (in the source camera) plane.
struct PlaneSpec {
  double distance = 2.0;
};

// Homography induced by the plane z = distance of the source frame.
Homography plane_homography(const Viewpoint& src, const Viewpoint& dst, const PlaneSpec& plane);
Homography plane_homography(const RigCalibration& rig, Side camera, Side eye, const PlaneSpec& plane);

}  // namespace vstbench::geometry
