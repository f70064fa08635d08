#include "vstbench/geometry.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace vstbench::geometry {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw GeometryError("focal lengths must be positive");
  if (width < 2 || height < 2) throw GeometryError("image must be at least 2x2 pixels");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw GeometryError("principal point must be finite");
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

bool CameraIntrinsics::contains(const PixelCoord& p) const {
  return p.u >= -0.5 && p.v >= -0.5 && p.u < width - 0.5 && p.v < height - 0.5;
}

void Pose::validate() const {
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
  if (!(ortho < 1e-9)) throw GeometryError("pose rotation is not orthonormal");
  if (!(rotation.determinant() > 0.0)) throw GeometryError("pose rotation has negative determinant");
  if (!translation.allFinite()) throw GeometryError("pose translation must be finite");
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose Pose::compose(const Pose& other) const {
  Pose out;
  out.rotation = rotation * other.rotation;
  out.translation = rotation * other.translation + translation;
  return out;
}

Pose Pose::from_euler(double yaw, double pitch, double roll, const Eigen::Vector3d& t) {
  Pose p;
  p.rotation = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
                Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) *
                Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()))
                   .toRotationMatrix();
  p.translation = t;
  return p;
}

std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

Side parse_side(std::string_view s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw ConfigError("unknown side '" + std::string(s) + "' (expected left or right)");
}

void RigCalibration::validate() const {
  for (const Viewpoint* vp : {&left_camera, &right_camera, &left_eye, &right_eye}) {
    vp->pose.validate();
    vp->intrinsics.validate();
  }
  if (!(camera_baseline() > 0.0)) throw GeometryError("camera baseline must be positive");
  if (!((left_eye.pose.translation - right_eye.pose.translation).norm() > 0.0))
    throw GeometryError("eye baseline must be positive");
}

double RigCalibration::camera_baseline() const {
  return (left_camera.pose.translation - right_camera.pose.translation).norm();
}

RigCalibration make_rig(const RigLayout& layout) {
  const double half = layout.eye_baseline / 2.0;
  const double cam_x = half + layout.camera_outward;
  RigCalibration rig;
  rig.left_eye = {Pose{Eigen::Matrix3d::Identity(), {-half, 0.0, 0.0}}, layout.intrinsics};
  rig.right_eye = {Pose{Eigen::Matrix3d::Identity(), {half, 0.0, 0.0}}, layout.intrinsics};
  rig.left_camera = {Pose{Eigen::Matrix3d::Identity(), {-cam_x, 0.0, layout.camera_forward}},
                     layout.intrinsics};
  rig.right_camera = {Pose{Eigen::Matrix3d::Identity(), {cam_x, 0.0, layout.camera_forward}},
                      layout.intrinsics};
  return rig;
}

RigCalibration make_lateral_rig(double offset, const CameraIntrinsics& k) {
  RigLayout layout;
  layout.camera_forward = 0.0;
  layout.camera_outward = offset;
  layout.intrinsics = k;
  return make_rig(layout);
}

Viewpoint place(const Viewpoint& vp, const Pose& rig_pose) {
  return Viewpoint{rig_pose.compose(vp.pose), vp.intrinsics};
}

Pose relative_pose(const Pose& src, const Pose& dst) { return dst.inverse().compose(src); }

PixelCoord project(const Point3& point, const CameraIntrinsics& k) {
  if (!(point.z() > 0.0)) throw GeometryError("behind camera");
  return {k.fx * point.x() / point.z() + k.cx, k.fy * point.y() / point.z() + k.cy};
}

Point3 unproject(const PixelCoord& pixel, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0) || !std::isfinite(depth)) throw GeometryError("invalid depth");
  return {(pixel.u - k.cx) / k.fx * depth, (pixel.v - k.cy) / k.fy * depth, depth};
}

std::optional<Reprojection> reproject(const PixelCoord& pixel, double depth, const Viewpoint& src,
                                      const Viewpoint& dst) {
  const Point3 in_src = unproject(pixel, depth, src.intrinsics);
  const Pose rel = relative_pose(src.pose, dst.pose);
  const Point3 in_dst = rel.apply(in_src);
  if (!(in_dst.z() > 0.0)) return std::nullopt;
  return Reprojection{project(in_dst, dst.intrinsics), in_dst.z()};
}

std::optional<PixelCoord> reproject_pixel(const PixelCoord& pixel, double depth, Side camera, Side eye,
                                          const RigCalibration& rig) {
  auto r = reproject(pixel, depth, rig.camera(camera), rig.eye(eye));
  if (!r) return std::nullopt;
  return r->pixel;
}

Homography::Homography(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) throw GeometryError("homography has non-finite entries");
  if (std::abs(m(2, 2)) < 1e-12) throw GeometryError("homography bottom-right entry vanishes");
  m_ = m / m(2, 2);
  if (std::abs(m_.determinant()) < 1e-12) throw GeometryError("homography is singular");
}

bool Homography::try_apply(const PixelCoord& p, PixelCoord& out) const {
  const Eigen::Vector3d h = m_ * Eigen::Vector3d(p.u, p.v, 1.0);
  if (std::abs(h.z()) < 1e-15) return false;
  out = {h.x() / h.z(), h.y() / h.z()};
  return true;
}

PixelCoord Homography::apply(const PixelCoord& p) const {
  PixelCoord out;
  if (!try_apply(p, out)) throw GeometryError("point maps to infinity");
  return out;
}

Homography Homography::inverse() const { return Homography(m_.inverse()); }

Homography Homography::operator*(const Homography& rhs) const { return Homography(m_ * rhs.m_); }

Homography four_point_homography(const std::array<PixelCoord, 4>& from, const std::array<PixelCoord, 4>& to) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = from[i].u, y = from[i].v, u = to[i].u, v = to[i].v;
    a.row(2 * i) << x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
  if (!lu.isInvertible()) throw GeometryError("degenerate four-point configuration");
  const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return Homography(m);
}

Homography plane_homography(const Viewpoint& src, const Viewpoint& dst, const PlaneSpec& plane) {
  if (!(plane.distance > 0.0)) throw GeometryError("plane distance must be positive");
  src.intrinsics.validate();
  dst.intrinsics.validate();
  // x_dst = R x_src + t, and n^T x_src = d on the plane, so x_dst = (R + t n^T / d) x_src.
  const Pose rel = relative_pose(src.pose, dst.pose);
  const Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  const Eigen::Matrix3d induced = rel.rotation + rel.translation * normal.transpose() / plane.distance;
  return Homography(dst.intrinsics.matrix() * induced * src.intrinsics.matrix().inverse());
}

Homography plane_homography(const RigCalibration& rig, Side camera, Side eye, const PlaneSpec& plane) {
  return plane_homography(rig.camera(camera), rig.eye(eye), plane);
}

}  // namespace vstbench::geometry
