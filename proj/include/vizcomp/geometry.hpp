#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>

namespace vizcomp {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Placement of a panel in world space: translation, unit-quaternion rotation
/// and positive uniform scale. World = position + rotation * (scale * local).
template <typename Scalar>
struct BasicPose {
  using Vec3 = Vector3<Scalar>;
  using Quat = Eigen::Quaternion<Scalar>;

  Vec3 position = Vec3::Zero();
  Quat rotation = Quat::Identity();
  Scalar scale = Scalar(1);

  Vec3 apply(const Vec3& local) const { return position + rotation * (scale * local); }

  /// Local panel normal (+z) in world space.
  Vec3 normal() const { return rotation * Vec3::UnitZ(); }

  bool valid(Scalar tolerance = Scalar(1e-6)) const {
    return position.allFinite() && std::abs(rotation.norm() - Scalar(1)) <= tolerance &&
           std::isfinite(scale) && scale > Scalar(0);
  }

  friend bool operator==(const BasicPose& a, const BasicPose& b) {
    return a.position == b.position && a.rotation.coeffs() == b.rotation.coeffs() && a.scale == b.scale;
  }
};

/// Rigid motion (no scale) applied to whole scenes.
template <typename Scalar>
struct RigidTransform {
  Eigen::Quaternion<Scalar> rotation = Eigen::Quaternion<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();

  Vector3<Scalar> operator()(const Vector3<Scalar>& p) const { return rotation * p + translation; }

  BasicPose<Scalar> operator()(const BasicPose<Scalar>& pose) const {
    return {rotation * pose.position + translation, (rotation * pose.rotation).normalized(), pose.scale};
  }
};

/// Oriented bounding box; `axes` holds the three unit axes as columns.
template <typename Scalar>
struct BasicObb {
  using Vec3 = Vector3<Scalar>;
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

  Vec3 center = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 halfExtents = Vec3::Ones();

  /// Box with local center and half extents carried through `pose`.
  static BasicObb from_local(const BasicPose<Scalar>& pose, const Vec3& local_center,
                             const Vec3& local_half) {
    return {pose.apply(local_center), pose.rotation.toRotationMatrix(), local_half * pose.scale};
  }

  Vec3 to_local(const Vec3& p) const { return axes.transpose() * (p - center); }

  bool contains(const Vec3& p, Scalar tolerance = Scalar(0)) const {
    const Vec3 q = to_local(p).cwiseAbs();
    return (q.array() <= halfExtents.array() + tolerance).all();
  }

  Vec3 corner(int index) const {
    Vec3 c = center;
    for (int k = 0; k < 3; ++k) {
      c += ((index >> k) & 1 ? Scalar(1) : Scalar(-1)) * halfExtents[k] * axes.col(k);
    }
    return c;
  }

  BasicObb inflated(Scalar amount) const {
    return {center, axes, (halfExtents.array() + amount).max(Scalar(0)).matrix()};
  }
};

/// Separating-axis overlap test over the 15 candidate axes (3 face normals of
/// each box and the 9 edge cross products). Touching boxes collide.
template <typename Scalar>
bool collide(const BasicObb<Scalar>& a, const BasicObb<Scalar>& b) {
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
  // Guards the cross-product axes that degenerate when edges are parallel.
  const Scalar eps = std::max(Scalar(1e-9), Scalar(16) * std::numeric_limits<Scalar>::epsilon());

  const Mat3 r = a.axes.transpose() * b.axes;
  const Mat3 abs_r = (r.cwiseAbs().array() + eps).matrix();
  const Vector3<Scalar> t = a.axes.transpose() * (b.center - a.center);
  const auto& ea = a.halfExtents;
  const auto& eb = b.halfExtents;

  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) > ea[i] + eb.dot(abs_r.row(i).transpose())) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (std::abs(t.dot(r.col(j))) > ea.dot(abs_r.col(j)) + eb[j]) return false;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3;
    const int i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3;
      const int j2 = (j + 2) % 3;
      const Scalar ra = ea[i1] * abs_r(i2, j) + ea[i2] * abs_r(i1, j);
      const Scalar rb = eb[j1] * abs_r(i, j2) + eb[j2] * abs_r(i, j1);
      if (std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j)) > ra + rb) return false;
    }
  }
  return true;
}

/// Angle in degrees between two panel normals, folded into [0, 90].
template <typename Scalar>
Scalar normal_angle_degrees(const Vector3<Scalar>& n1, const Vector3<Scalar>& n2) {
  const Scalar c = std::clamp(std::abs(n1.normalized().dot(n2.normalized())), Scalar(0), Scalar(1));
  // atan2 keeps precision near 0 and 90 where acos does not.
  const Scalar s = n1.normalized().cross(n2.normalized()).norm();
  return std::atan2(s, c) * Scalar(180) / Scalar(EIGEN_PI);
}

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Pose = BasicPose<double>;
using Obb = BasicObb<double>;
using Rigid = RigidTransform<double>;

}  // namespace vizcomp
