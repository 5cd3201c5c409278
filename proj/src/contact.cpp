#include "extman/contact.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "extman/errors.hpp"

namespace extman {

std::string to_string(EnvContact c) {
  switch (c) {
    case EnvContact::Free: return "free";
    case EnvContact::Ground: return "ground";
    case EnvContact::GroundWall: return "ground+wall";
  }
  return "free";
}

std::string to_string(RobotContact c) {
  switch (c) {
    case RobotContact::None: return "none";
    case RobotContact::Top: return "top";
    case RobotContact::Antipodal: return "antipodal";
    case RobotContact::Grasp: return "grasp";
  }
  return "none";
}

EnvContact env_contact_from_string(const std::string& s) {
  if (s == "free") return EnvContact::Free;
  if (s == "ground") return EnvContact::Ground;
  if (s == "ground+wall") return EnvContact::GroundWall;
  throw ParseError("unknown environment contact '" + s + "'");
}

RobotContact robot_contact_from_string(const std::string& s) {
  if (s == "none") return RobotContact::None;
  if (s == "top") return RobotContact::Top;
  if (s == "antipodal") return RobotContact::Antipodal;
  if (s == "grasp") return RobotContact::Grasp;
  throw ParseError("unknown robot contact '" + s + "'");
}

std::array<Eigen::Vector3d, 2> fingertips(const GripperModel& model,
                                          const GripperConfig& cfg) {
  const Eigen::Vector3d left(0.5 * cfg.opening, 0.0, model.finger_length);
  const Eigen::Vector3d right(-0.5 * cfg.opening, 0.0, model.finger_length);
  return {cfg.pose.apply(left), cfg.pose.apply(right)};
}

double ground_residual(const Cuboid& box, const Pose& pose) {
  const auto pts = corners(box, pose);
  double z = pts[0].z();
  for (const auto& p : pts) z = std::min(z, p.z());
  return z;
}

namespace {

struct WallPair {
  int idx[2];
  Eigen::Vector2d dist;
};

WallPair wall_pair(const Scene& scene, const Cuboid& box, const Pose& pose) {
  const Plane plane = wall_plane(scene);
  const auto pts = corners(box, pose);
  std::array<int, 8> order;
  std::array<double, 8> dist;
  for (int i = 0; i < 8; ++i) {
    order[i] = i;
    dist[i] = signed_distance_point_plane(pts[i], plane);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  });
  std::array<int, 4> nearest = {order[0], order[1], order[2], order[3]};
  std::sort(nearest.begin(), nearest.end(), [&](int a, int b) {
    if (pts[a].z() != pts[b].z()) return pts[a].z() < pts[b].z();
    return a < b;
  });
  WallPair pair;
  pair.idx[0] = std::min(nearest[0], nearest[1]);
  pair.idx[1] = std::max(nearest[0], nearest[1]);
  pair.dist = Eigen::Vector2d(dist[pair.idx[0]], dist[pair.idx[1]]);
  return pair;
}

}  // namespace

Eigen::Vector2d wall_residual(const Scene& scene, const Cuboid& box,
                              const Pose& pose) {
  return wall_pair(scene, box, pose).dist;
}

double wall_min_corner_distance(const Scene& scene, const Cuboid& box,
                                const Pose& pose) {
  const Plane plane = wall_plane(scene);
  const auto pts = corners(box, pose);
  double best = signed_distance_point_plane(pts[0], plane);
  for (const auto& p : pts)
    best = std::min(best, signed_distance_point_plane(p, plane));
  return best;
}

int down_face_axis(const Pose& pose, double* sign) {
  const Eigen::Matrix3d rot = pose.q.toRotationMatrix();
  int axis = 0;
  double best = 1.0;
  double best_sign = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double s = rot(2, i) > 0.0 ? -1.0 : 1.0;
    const double z = s * rot(2, i);
    if (z < best) {
      best = z;
      axis = i;
      best_sign = s;
    }
  }
  if (sign) *sign = best_sign;
  return axis;
}

Eigen::Vector2d down_face_tilt(const Pose& pose) {
  double sign = 1.0;
  const int axis = down_face_axis(pose, &sign);
  const Eigen::Matrix3d rot = pose.q.toRotationMatrix();
  return Eigen::Vector2d(sign * rot(0, axis), sign * rot(1, axis));
}

bool no_penetration(const Scene& scene, const Cuboid& box, const Pose& pose,
                    double tol) {
  const auto pts = corners(box, pose);
  for (const auto& p : pts)
    if (p.z() < -tol) return false;
  if (scene.wall) {
    const Plane plane = wall_plane(scene);
    const Eigen::Vector3d lateral = wall_lateral(scene);
    for (const auto& p : pts) {
      const double d = signed_distance_point_plane(p, plane);
      const double lat = std::abs((p - plane.point).dot(lateral));
      if (d < -tol && p.z() < scene.wall->height - tol &&
          lat < 0.5 * scene.wall->length + tol)
        return false;
    }
  }
  for (const Obstacle& obs : scene.obstacles) {
    if (boxes_separation(box, pose, obs.box, obs.pose()) < -tol) return false;
  }
  return true;
}

bool satisfies_env(const Scene& scene, const Cuboid& box, const Pose& pose,
                   EnvContact contact, double tol) {
  if (!no_penetration(scene, box, pose, tol)) return false;
  if (contact == EnvContact::Free) return true;
  if (std::abs(ground_residual(box, pose)) > tol) return false;
  if (contact == EnvContact::Ground) return true;
  if (!scene.wall) return false;
  const WallPair pair = wall_pair(scene, box, pose);
  if (std::abs(pair.dist[0]) > tol || std::abs(pair.dist[1]) > tol) return false;
  const auto pts = corners(box, pose);
  return within_wall_span(scene, pts[pair.idx[0]]) &&
         within_wall_span(scene, pts[pair.idx[1]]);
}

bool is_freestanding(const Scene& scene, const Cuboid& box, const Pose& pose,
                     double tol) {
  if (!no_penetration(scene, box, pose, tol)) return false;
  if (ground_residual(box, pose) > tol) return false;
  double sign = 1.0;
  const int axis = down_face_axis(pose, &sign);
  const Eigen::Matrix3d rot = pose.q.toRotationMatrix();
  const Eigen::Vector3d down = sign * rot.col(axis);
  const double cos_tilt = std::clamp(-down.z(), -1.0, 1.0);
  if (std::acos(cos_tilt) > kUprightTolDeg * M_PI / 180.0) return false;

  // Support patch: the down face in cyclic order, checked against the
  // centroid's ground projection with a safety margin.
  const int u = (axis + 1) % 3;
  const int v = (axis + 2) % 3;
  const double su[4] = {-1.0, 1.0, 1.0, -1.0};
  const double sv[4] = {-1.0, -1.0, 1.0, 1.0};
  Eigen::Vector2d poly[4];
  for (int k = 0; k < 4; ++k) {
    Eigen::Vector3d local = Eigen::Vector3d::Zero();
    local[axis] = sign * box.half[axis];
    local[u] = su[k] * box.half[u];
    local[v] = sv[k] * box.half[v];
    poly[k] = pose.apply(local).head<2>();
  }
  double area = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector2d& a = poly[k];
    const Eigen::Vector2d& b = poly[(k + 1) % 4];
    area += a.x() * b.y() - b.x() * a.y();
  }
  const double orient = area >= 0.0 ? 1.0 : -1.0;
  const Eigen::Vector2d c = pose.p.head<2>();
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector2d& a = poly[k];
    const Eigen::Vector2d& b = poly[(k + 1) % 4];
    const Eigen::Vector2d e = b - a;
    const double len = e.norm();
    if (len < 1e-12) return false;
    const double inward =
        orient * (e.x() * (c.y() - a.y()) - e.y() * (c.x() - a.x())) / len;
    if (inward < kSupportMargin) return false;
  }
  return true;
}

Eigen::VectorXd env_equality_residuals(const Scene& scene, const Cuboid& box,
                                       const Pose& pose, EnvContact contact) {
  if (contact == EnvContact::Free) return Eigen::VectorXd();
  const Eigen::Vector2d tilt = down_face_tilt(pose);
  if (contact == EnvContact::Ground) {
    Eigen::VectorXd r(3);
    r << tilt.x(), tilt.y(), ground_residual(box, pose);
    return r;
  }
  const Eigen::Vector2d wall = wall_residual(scene, box, pose);
  Eigen::VectorXd r(5);
  r << tilt.x(), tilt.y(), ground_residual(box, pose), wall.x(), wall.y();
  return r;
}

Eigen::VectorXd env_inequality_residuals(const Scene& scene, const Cuboid& box,
                                         const Pose& pose) {
  std::vector<double> vals;
  for (const Obstacle& obs : scene.obstacles)
    vals.push_back(boxes_separation(box, pose, obs.box, obs.pose()));
  if (scene.wall) vals.push_back(wall_min_corner_distance(scene, box, pose));
  const GripperModel& g = scene.gripper;
  for (int i = 0; i < 3; ++i) {
    vals.push_back(pose.p[i] - g.workspace_min[i]);
    vals.push_back(g.workspace_max[i] - pose.p[i]);
  }
  Eigen::VectorXd r(static_cast<int>(vals.size()));
  for (int i = 0; i < r.size(); ++i) r[i] = vals[i];
  return r;
}

namespace {

Eigen::Vector3d top_center(const Cuboid& box, const Pose& object) {
  const Eigen::Matrix3d rot = object.q.toRotationMatrix();
  int axis = 0;
  double best = -2.0;
  double best_sign = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double s = rot(2, i) >= 0.0 ? 1.0 : -1.0;
    const double z = s * rot(2, i);
    if (z > best) {
      best = z;
      axis = i;
      best_sign = s;
    }
  }
  return object.p + best_sign * box.half[axis] * rot.col(axis);
}

double top_height(const Cuboid& box, const Pose& object) {
  const auto pts = corners(box, object);
  double z = pts[0].z();
  for (const auto& p : pts) z = std::max(z, p.z());
  return z;
}

const Eigen::Quaterniond kFlipX(0.0, 1.0, 0.0, 0.0);  // approach straight down

}  // namespace

GripperConfig top_contact(const Cuboid& box, const Pose& object,
                          const GripperModel& model) {
  GripperConfig cfg;
  cfg.pose.q = kFlipX;
  cfg.pose.p = top_center(box, object) + Eigen::Vector3d(0, 0, model.finger_length);
  cfg.opening = 0.0;
  return cfg;
}

GripperConfig standoff_config(const Cuboid& box, const Pose& object,
                              const GripperModel& model) {
  GripperConfig cfg;
  cfg.pose.q = kFlipX;
  cfg.pose.p = top_center(box, object) +
               Eigen::Vector3d(0, 0, kStandoffHeight + model.finger_length);
  cfg.opening = model.max_opening;
  return cfg;
}

GripperConfig antipodal_config(const Scene& scene, const Cuboid& box,
                               const Pose& object, const GripperModel& model) {
  const Plane plane = wall_plane(scene);
  const Eigen::Matrix3d rot = object.q.toRotationMatrix();
  int axis = 0;
  double best = -2.0;
  double best_sign = 1.0;
  for (int i = 0; i < 3; ++i) {
    for (double s : {-1.0, 1.0}) {
      const double a = s * rot.col(i).dot(plane.normal);
      if (a > best) {
        best = a;
        axis = i;
        best_sign = s;
      }
    }
  }
  const Eigen::Vector3d press =
      object.p + best_sign * box.half[axis] * rot.col(axis);

  const Eigen::Vector3d ez = -plane.normal;
  const Eigen::Vector3d ex = wall_lateral(scene);
  const Eigen::Vector3d ey = ez.cross(ex);
  Eigen::Matrix3d frame;
  frame.col(0) = ex;
  frame.col(1) = ey;
  frame.col(2) = ez;

  GripperConfig cfg;
  cfg.pose.q = Eigen::Quaterniond(frame);
  cfg.pose.p = press - model.finger_length * ez;
  cfg.opening = 0.0;
  return cfg;
}

Eigen::Vector2d antipodal_residuals(const Scene& scene, const Cuboid& box,
                                    const Pose& object, const GripperModel& model,
                                    const GripperConfig& cfg) {
  const Plane plane = wall_plane(scene);
  const Eigen::Vector3d tip =
      cfg.pose.apply(Eigen::Vector3d(0, 0, model.finger_length));
  const double surface = point_box_surface_distance(tip, box, object);
  const Eigen::Vector3d off = tip - object.p;
  double cone = 0.0;
  if (off.norm() > 1e-12) {
    const double cos_a =
        std::clamp(off.normalized().dot(plane.normal), -1.0, 1.0);
    cone = std::max(0.0, std::acos(cos_a) - kConeHalfAngle);
  }
  return Eigen::Vector2d(surface, cone);
}

GripperConfig grasp_config(const Scene& scene, const Cuboid& box,
                           const Pose& object, const GripperModel& model) {
  const Eigen::Matrix3d rot = object.q.toRotationMatrix();
  int up_axis = 0;
  double up_best = -2.0;
  for (int i = 0; i < 3; ++i) {
    const double z = std::abs(rot(2, i));
    if (z > up_best) {
      up_best = z;
      up_axis = i;
    }
  }
  int grasp_axis = -1;
  double thickness = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (i == up_axis) continue;
    const double t = 2.0 * box.half[i];
    if (grasp_axis < 0 || t < thickness) {
      grasp_axis = i;
      thickness = t;
    }
  }
  if (thickness + kGraspSlack > model.max_opening)
    throw TooWideError("grasp needs opening " +
                       std::to_string(thickness + kGraspSlack) +
                       " m, gripper max is " +
                       std::to_string(model.max_opening) + " m");

  const double top_z = top_height(box, object);
  const double insert_z = top_z - kGripDepth;
  if (scene.wall && insert_z < scene.wall->height) {
    const double gap = wall_min_corner_distance(scene, box, object);
    if (gap < model.finger_thickness)
      throw NoClearanceError(
          "fingers must reach below the wall top but the wall gap is " +
          std::to_string(gap) + " m");
  }

  Eigen::Vector3d a = rot.col(grasp_axis);
  a.z() = 0.0;
  if (a.norm() < 1e-9) a = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ex = a.normalized();
  const Eigen::Vector3d ez(0, 0, -1);
  const Eigen::Vector3d ey = ez.cross(ex);
  Eigen::Matrix3d frame;
  frame.col(0) = ex;
  frame.col(1) = ey;
  frame.col(2) = ez;

  GripperConfig cfg;
  cfg.pose.q = Eigen::Quaterniond(frame);
  cfg.pose.p =
      Eigen::Vector3d(object.p.x(), object.p.y(), insert_z + model.finger_length);
  cfg.opening = thickness + kGraspSlack;
  return cfg;
}

GripperConfig robot_contact_config(RobotContact contact, const Scene& scene,
                                   const Cuboid& box, const Pose& object,
                                   const GripperModel& model) {
  GripperConfig cfg;
  switch (contact) {
    case RobotContact::None:
      cfg = standoff_config(box, object, model);
      break;
    case RobotContact::Top:
      cfg = top_contact(box, object, model);
      break;
    case RobotContact::Antipodal:
      cfg = antipodal_config(scene, box, object, model);
      break;
    case RobotContact::Grasp:
      cfg = grasp_config(scene, box, object, model);
      break;
  }
  const auto tips = fingertips(model, cfg);
  if (!model.in_workspace(cfg.pose.p) || !model.in_workspace(tips[0]) ||
      !model.in_workspace(tips[1]))
    throw WorkspaceViolation("gripper configuration outside the workspace");
  return cfg;
}

}  // namespace extman
