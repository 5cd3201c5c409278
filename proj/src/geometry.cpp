#include "extman/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace extman {

bool bitwise_equal(const Pose& a, const Pose& b) {
  return a.p.x() == b.p.x() && a.p.y() == b.p.y() && a.p.z() == b.p.z() &&
         a.q.w() == b.q.w() && a.q.x() == b.q.x() && a.q.y() == b.q.y() &&
         a.q.z() == b.q.z();
}

Eigen::Quaterniond normalized_lazy(const Eigen::Quaterniond& q) {
  const double n2 = q.squaredNorm();
  if (std::abs(n2 - 1.0) <= 1e-12) return q;
  const double inv = 1.0 / std::sqrt(n2);
  return Eigen::Quaterniond(q.w() * inv, q.x() * inv, q.y() * inv, q.z() * inv);
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.p = a.q * b.p + a.p;
  out.q = normalized_lazy(a.q * b.q);
  return out;
}

Pose inverse(const Pose& x) {
  Pose out;
  out.q = x.q.conjugate();
  out.p = -(out.q * x.p);
  return out;
}

Pose relative_transform(const Pose& a, const Pose& b) {
  if (bitwise_equal(a, b)) return Pose::identity();
  return compose(b, inverse(a));
}

double angular_distance(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  // Geodesic metric 2*acos(|<a,b>|), evaluated via atan2 for small angles.
  Eigen::Quaterniond d = a.conjugate() * b;
  if (d.w() < 0.0) d.coeffs() = -d.coeffs();
  return 2.0 * std::atan2(d.vec().norm(), d.w());
}

Eigen::Quaterniond exp_map(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-12) {
    Eigen::Quaterniond q(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z());
    return normalized_lazy(q);
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / angle;
  return Eigen::Quaterniond(std::cos(half), s * w.x(), s * w.y(), s * w.z());
}

Eigen::Vector3d log_map(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double vn = q.vec().norm();
  if (vn < 1e-12) return 2.0 * q.vec();
  const double angle = 2.0 * std::atan2(vn, q.w());
  return (angle / vn) * q.vec();
}

std::array<Eigen::Vector3d, 8> corners(const Cuboid& box, const Pose& pose) {
  std::array<Eigen::Vector3d, 8> out;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector3d local((k & 1) ? box.half.x() : -box.half.x(),
                                (k & 2) ? box.half.y() : -box.half.y(),
                                (k & 4) ? box.half.z() : -box.half.z());
    out[k] = pose.apply(local);
  }
  return out;
}

double signed_distance_point_plane(const Eigen::Vector3d& p, const Plane& plane) {
  return (p - plane.point).dot(plane.normal);
}

namespace {

// Projection radius of an oriented box onto a unit axis.
double projected_radius(const Cuboid& box, const Eigen::Matrix3d& rot,
                        const Eigen::Vector3d& axis) {
  return box.half.x() * std::abs(axis.dot(rot.col(0))) +
         box.half.y() * std::abs(axis.dot(rot.col(1))) +
         box.half.z() * std::abs(axis.dot(rot.col(2)));
}

}  // namespace

double boxes_separation(const Cuboid& a, const Pose& pa, const Cuboid& b, const Pose& pb) {
  const Eigen::Matrix3d ra = pa.q.toRotationMatrix();
  const Eigen::Matrix3d rb = pb.q.toRotationMatrix();
  const Eigen::Vector3d d = pb.p - pa.p;

  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::Vector3d& axis_raw) {
    const double n = axis_raw.norm();
    if (n < 1e-12) return;
    const Eigen::Vector3d axis = axis_raw / n;
    const double sep = std::abs(d.dot(axis)) -
                       (projected_radius(a, ra, axis) + projected_radius(b, rb, axis));
    best = std::max(best, sep);
  };

  for (int i = 0; i < 3; ++i) consider(ra.col(i));
  for (int i = 0; i < 3; ++i) consider(rb.col(i));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) consider(ra.col(i).cross(rb.col(j)));
  return best;
}

bool boxes_overlap(const Cuboid& a, const Pose& pa, const Cuboid& b, const Pose& pb) {
  return boxes_separation(a, pa, b, pb) < 0.0;
}

double point_box_surface_distance(const Eigen::Vector3d& p, const Cuboid& box,
                                  const Pose& pose) {
  const Eigen::Vector3d local = pose.q.conjugate() * (p - pose.p);
  const Eigen::Vector3d excess = local.cwiseAbs() - box.half;
  if ((excess.array() <= 0.0).all()) {
    // Inside: distance to the nearest face.
    return -excess.maxCoeff();
  }
  return excess.cwiseMax(0.0).norm();
}

bool point_in_box(const Eigen::Vector3d& p, const Cuboid& box, const Pose& pose) {
  const Eigen::Vector3d local = pose.q.conjugate() * (p - pose.p);
  return (local.cwiseAbs().array() <= box.half.array()).all();
}

}  // namespace extman
