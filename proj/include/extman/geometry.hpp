#pragma once

#include <array>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace extman {

/// Rigid transform: rotation followed by translation, p_world = q * p_body + p.
struct Pose {
  Eigen::Vector3d p{0.0, 0.0, 0.0};
  Eigen::Quaterniond q{1.0, 0.0, 0.0, 0.0};  // (w, x, y, z), unit norm

  static Pose identity() { return Pose{}; }
  static Pose translation(double x, double y, double z) {
    return Pose{Eigen::Vector3d(x, y, z), Eigen::Quaterniond::Identity()};
  }
  static Pose rot_z(double angle) {
    return Pose{Eigen::Vector3d::Zero(),
                Eigen::Quaterniond(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()))};
  }
  static Pose rot_y(double angle) {
    return Pose{Eigen::Vector3d::Zero(),
                Eigen::Quaterniond(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitY()))};
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& v) const { return q * v + p; }
};

/// Axis-aligned box in its body frame, described by half extents.
struct Cuboid {
  Eigen::Vector3d half{0.0, 0.0, 0.0};
};

/// Oriented plane; signed distance is positive on the side the normal points to.
struct Plane {
  Eigen::Vector3d point{0.0, 0.0, 0.0};
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
};

bool bitwise_equal(const Pose& a, const Pose& b);

/// Renormalizes only when the norm has drifted, so exact inputs pass through.
Eigen::Quaterniond normalized_lazy(const Eigen::Quaterniond& q);

/// compose(a, b): apply b first, then a.
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& x);

/// X such that compose(X, a) == b. Returns exact identity when a and b are
/// bitwise equal.
Pose relative_transform(const Pose& a, const Pose& b);

/// Geodesic angle between orientations, in [0, pi].
double angular_distance(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

/// Rotation-vector exponential map.
Eigen::Quaterniond exp_map(const Eigen::Vector3d& w);
Eigen::Vector3d log_map(const Eigen::Quaterniond& q);

/// World-frame vertices; index bit 0/1/2 selects the sign of x/y/z half extent.
std::array<Eigen::Vector3d, 8> corners(const Cuboid& box, const Pose& pose);

double signed_distance_point_plane(const Eigen::Vector3d& p, const Plane& plane);

/// Separating-axis test over face normals and edge cross products.
bool boxes_overlap(const Cuboid& a, const Pose& pa, const Cuboid& b, const Pose& pb);

/// Largest separation over all candidate axes; positive when disjoint,
/// negative when overlapping on every axis.
double boxes_separation(const Cuboid& a, const Pose& pa, const Cuboid& b, const Pose& pb);

/// Distance from a point to the surface of a box (0 on the surface, positive
/// outside and inside both).
double point_box_surface_distance(const Eigen::Vector3d& p, const Cuboid& box, const Pose& pose);

bool point_in_box(const Eigen::Vector3d& p, const Cuboid& box, const Pose& pose);

}  // namespace extman
