#include "extman/sim.hpp"

#include <algorithm>
#include <cmath>

#include "extman/errors.hpp"
#include "extman/primitives.hpp"

namespace extman {

std::string to_string(ActionMode m) {
  switch (m) {
    case ActionMode::Free: return "free";
    case ActionMode::Push: return "push";
    case ActionMode::Pivot: return "pivot";
    case ActionMode::Attached: return "attached";
  }
  return "free";
}

ActionMode action_mode_from_string(const std::string& s) {
  if (s == "free") return ActionMode::Free;
  if (s == "push") return ActionMode::Push;
  if (s == "pivot") return ActionMode::Pivot;
  if (s == "attached") return ActionMode::Attached;
  throw ParseError("unknown action mode '" + s + "'");
}

SimState initial_state(const Scene& scene, const Pose& object) {
  SimState s;
  s.object = object;
  s.gripper.pose.p = Eigen::Vector3d(0.3, 0.0, 0.4);
  s.gripper.pose.q = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);
  s.gripper.opening = scene.gripper.max_opening;
  s.attached = false;
  return s;
}

namespace {

constexpr double kEps = 1e-9;

Pose rigid_about(const Pose& pose, const Eigen::Quaterniond& rot,
                 const Eigen::Vector3d& center, const Eigen::Vector3d& trans) {
  Pose out;
  out.p = center + rot * (pose.p - center) + trans;
  out.q = normalized_lazy(rot * pose.q);
  return out;
}

bool point_hits_world(const Scene& scene, const Eigen::Vector3d& p) {
  if (p.z() < -kEps) return true;
  if (scene.wall) {
    const Plane plane = wall_plane(scene);
    const Eigen::Vector3d lateral = wall_lateral(scene);
    const double d = signed_distance_point_plane(p, plane);
    const double lat = std::abs((p - plane.point).dot(lateral));
    if (d < -kEps && p.z() < scene.wall->height - kEps &&
        lat < 0.5 * scene.wall->length + kEps)
      return true;
  }
  for (const Obstacle& obs : scene.obstacles) {
    if (point_in_box(p, obs.box, obs.pose()) &&
        point_box_surface_distance(p, obs.box, obs.pose()) > kEps)
      return true;
  }
  return false;
}

bool gripper_collides(const Scene& scene, const Cuboid& box, const Pose& object,
                      const GripperConfig& cfg, bool check_object) {
  const auto tips = fingertips(scene.gripper, cfg);
  const Eigen::Vector3d pts[3] = {cfg.pose.p, tips[0], tips[1]};
  for (const auto& p : pts) {
    if (point_hits_world(scene, p)) return true;
    if (check_object && point_in_box(p, box, object) &&
        point_box_surface_distance(p, box, object) > kEps)
      return true;
  }
  return false;
}

bool object_placement_ok(const Scene& scene, const Cuboid& box, const Pose& pose) {
  if (!no_penetration(scene, box, pose, kEps)) return false;
  const GripperModel& g = scene.gripper;
  for (int i = 0; i < 3; ++i) {
    if (pose.p[i] < g.workspace_min[i] - kEps) return false;
    if (pose.p[i] > g.workspace_max[i] + kEps) return false;
  }
  return true;
}

template <typename F>
double bisect_fraction(const F& feasible) {
  if (feasible(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 48; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double tip_surface_distance(const Scene& scene, const Cuboid& box,
                            const Pose& object, const GripperConfig& cfg) {
  const auto tips = fingertips(scene.gripper, cfg);
  return std::min(point_box_surface_distance(tips[0], box, object),
                  point_box_surface_distance(tips[1], box, object));
}

StepResult fault(const SimState& state, const std::string& code) {
  StepResult out;
  out.state = state;
  out.clip = 0.0;
  out.fault = code;
  return out;
}

StepResult step_free(const SimState& state, const Action& action,
                     const Scene& scene, const ObjectModel& object) {
  SimState s = state;
  if (action.release) {
    s.attached = false;
    s.object = settle(scene, object.box, s.object);
  } else if (s.attached) {
    return fault(state, "free_step_while_attached");
  }

  const double open0 = s.gripper.opening;
  const double open1 = action.opening
                           ? std::clamp(*action.opening, 0.0,
                                        scene.gripper.max_opening)
                           : open0;
  const Eigen::Vector3d rot = action.rotation;
  const Eigen::Vector3d t = action.translation;
  const Eigen::Vector3d base_p = s.gripper.pose.p;
  const Eigen::Quaterniond base_q = s.gripper.pose.q;

  const auto at = [&](double f) {
    GripperConfig cfg;
    cfg.pose.p = base_p + f * t;
    cfg.pose.q = normalized_lazy(exp_map(f * rot) * base_q);
    cfg.opening = open0 + f * (open1 - open0);
    return cfg;
  };
  const auto feasible = [&](double f) {
    return !gripper_collides(scene, object.box, s.object, at(f), !s.attached);
  };
  const double f = bisect_fraction(feasible);
  s.gripper = at(f);
  if (f == 1.0) {
    s.gripper.pose.p = base_p + t;
    s.gripper.opening = open1;
  }

  if (action.attach) {
    if (tip_surface_distance(scene, object.box, s.object, s.gripper) > 1e-3)
      return fault(state, "attach_without_contact");
    s.attached = true;
  }
  StepResult out;
  out.state = s;
  out.clip = f;
  return out;
}

StepResult step_push(const SimState& state, const Action& action,
                     const Scene& scene, const ObjectModel& object) {
  if (state.attached) return fault(state, "planar_step_while_attached");
  if (std::abs(action.translation.z()) > kEps)
    return fault(state, "planar_step_off_level");
  if (std::abs(action.rotation.x()) > kEps || std::abs(action.rotation.y()) > kEps)
    return fault(state, "planar_rotation_not_yaw");
  if (tip_surface_distance(scene, object.box, state.object, state.gripper) > 2e-3)
    return fault(state, "press_contact_missing");
  if (std::abs(ground_residual(object.box, state.object)) > 1e-4)
    return fault(state, "planar_step_off_ground");
  if (!is_freestanding(scene, object.box, state.object, 1e-4))
    return fault(state, "object_not_freestanding");

  const Eigen::Vector3d center = state.object.p;
  const double yaw = action.rotation.z();
  const Eigen::Vector3d t = action.translation;
  const auto at = [&](double f) {
    const Eigen::Quaterniond rot =
        exp_map(Eigen::Vector3d(0.0, 0.0, f * yaw));
    return rigid_about(state.object, rot, center, f * t);
  };
  const auto feasible = [&](double f) {
    return object_placement_ok(scene, object.box, at(f));
  };
  const double f = bisect_fraction(feasible);
  const Eigen::Quaterniond rot = exp_map(Eigen::Vector3d(0.0, 0.0, f * yaw));

  SimState s = state;
  s.object = rigid_about(state.object, rot, center, f * t);
  s.gripper.pose = rigid_about(state.gripper.pose, rot, center, f * t);
  StepResult out;
  out.state = s;
  out.clip = f;
  return out;
}

StepResult step_pivot(const SimState& state, const Action& action,
                      const Scene& scene, const ObjectModel& object) {
  if (!scene.wall) return fault(state, "pivot_without_wall");
  if (state.attached) return fault(state, "pivot_while_attached");
  const Eigen::Vector3d axis = wall_lateral(scene);
  // Sliding along the contact line is allowed; anything else is not a pivot.
  const double lat = action.translation.dot(axis);
  if ((action.translation - lat * axis).norm() > kEps)
    return fault(state, "pivot_translation_off_axis");
  const double dtheta = action.rotation.dot(axis);
  if ((action.rotation - dtheta * axis).norm() > 1e-9)
    return fault(state, "pivot_rotation_off_axis");
  if (wall_min_corner_distance(scene, object.box, state.object) > 5e-3 ||
      ground_residual(object.box, state.object) > 5e-3)
    return fault(state, "pivot_without_wall_contact");
  if (tip_surface_distance(scene, object.box, state.object, state.gripper) > 2e-3)
    return fault(state, "pivot_without_finger_contact");

  const Plane plane = wall_plane(scene);
  const Eigen::Vector3d center = state.object.p;
  const Eigen::Quaterniond rot = exp_map(dtheta * axis);
  Pose moved = rigid_about(state.object, rot, center, lat * axis);

  const double d_wall = wall_min_corner_distance(scene, object.box, moved);
  const Eigen::Vector3d wall_fix = -d_wall * plane.normal;
  moved.p += wall_fix;
  const double d_ground = ground_residual(object.box, moved);
  moved.p.z() -= d_ground;
  if (std::abs(d_wall) > 5e-3 || std::abs(d_ground) > 5e-3)
    return fault(state, "pivot_lost_contact");
  if (!object_placement_ok(scene, object.box, moved))
    return fault(state, "pivot_blocked");

  const Eigen::Vector3d fix = lat * axis + wall_fix + Eigen::Vector3d(0, 0, -d_ground);
  SimState s = state;
  s.object = moved;
  s.gripper.pose = rigid_about(state.gripper.pose, rot, center, fix);
  StepResult out;
  out.state = s;
  return out;
}

StepResult step_attached(const SimState& state, const Action& action,
                         const Scene& scene, const ObjectModel& object) {
  if (!state.attached) return fault(state, "not_attached");
  const Eigen::Vector3d center = state.gripper.pose.p;
  const Eigen::Vector3d t = action.translation;
  const Eigen::Vector3d rot = action.rotation;
  const auto at = [&](double f) {
    return rigid_about(state.object, exp_map(f * rot), center, f * t);
  };
  const auto feasible = [&](double f) {
    if (!object_placement_ok(scene, object.box, at(f))) return false;
    GripperConfig cfg;
    cfg.pose = rigid_about(state.gripper.pose, exp_map(f * rot), center, f * t);
    cfg.opening = state.gripper.opening;
    return !gripper_collides(scene, object.box, at(f), cfg, false);
  };
  const double f = bisect_fraction(feasible);
  const Eigen::Quaterniond rotq = exp_map(f * rot);

  SimState s = state;
  s.object = rigid_about(state.object, rotq, center, f * t);
  s.gripper.pose = rigid_about(state.gripper.pose, rotq, center, f * t);
  StepResult out;
  out.state = s;
  out.clip = f;
  return out;
}

}  // namespace

StepResult step(const SimState& state, const Action& action, const Scene& scene,
                const ObjectModel& object) {
  if (action.translation.norm() > kMaxStepTranslation + 1e-12 ||
      action.rotation.norm() > kMaxStepRotation + 1e-12)
    return fault(state, "action_bounds");
  switch (action.mode) {
    case ActionMode::Free: return step_free(state, action, scene, object);
    case ActionMode::Push: return step_push(state, action, scene, object);
    case ActionMode::Pivot: return step_pivot(state, action, scene, object);
    case ActionMode::Attached: return step_attached(state, action, scene, object);
  }
  return fault(state, "unknown_mode");
}

Pose settle(const Scene& scene, const Cuboid& box, const Pose& pose) {
  if (is_freestanding(scene, box, pose, 1e-7)) return pose;

  Pose out = pose;
  const double upright = kUprightTolDeg * M_PI / 180.0;
  for (int iter = 0; iter < 400; ++iter) {
    double sign = 1.0;
    const int axis = down_face_axis(out, &sign);
    const Eigen::Vector3d down = sign * out.q.toRotationMatrix().col(axis);
    const double tilt = std::acos(std::clamp(-down.z(), -1.0, 1.0));
    if (tilt <= upright) break;

    const auto pts = corners(box, out);
    int lo0 = 0;
    int lo1 = 1;
    if (pts[lo1].z() < pts[lo0].z()) std::swap(lo0, lo1);
    for (int i = 2; i < 8; ++i) {
      if (pts[i].z() < pts[lo0].z()) {
        lo1 = lo0;
        lo0 = i;
      } else if (pts[i].z() < pts[lo1].z()) {
        lo1 = i;
      }
    }
    Eigen::Vector3d edge = pts[lo1] - pts[lo0];
    edge.z() = 0.0;
    if (edge.norm() < 1e-9) edge = Eigen::Vector3d::UnitX();
    edge.normalize();
    const Eigen::Vector3d r = out.p - pts[lo0];
    const double fall = edge.cross(r).z();
    const Eigen::Vector3d w = (fall < 0.0 ? 1.0 : -1.0) * edge;
    const double dtheta = std::min(kMaxStepRotation, tilt);
    out = rigid_about(out, exp_map(dtheta * w), pts[lo0], Eigen::Vector3d::Zero());
    out.p.z() -= ground_residual(box, out);
  }

  // Square up onto the resting face and snap the remaining gaps.
  double sign = 1.0;
  const int axis = down_face_axis(out, &sign);
  const Eigen::Vector3d down = sign * out.q.toRotationMatrix().col(axis);
  const Eigen::Vector3d target(0.0, 0.0, -1.0);
  const Eigen::Vector3d cross = down.cross(target);
  if (cross.norm() > 1e-12) {
    const double ang = std::acos(std::clamp(down.dot(target), -1.0, 1.0));
    out = rigid_about(out, exp_map(ang * cross.normalized()), out.p,
                      Eigen::Vector3d::Zero());
  }
  out.p.z() -= ground_residual(box, out);
  if (scene.wall) {
    const double d = wall_min_corner_distance(scene, box, out);
    if (d < 0.0) out.p += -d * wall_plane(scene).normal;
  }
  return out;
}

RolloutResult rollout(Policy& policy, SimState& state, Trajectory& traj,
                      const GoalRegion& goal, const Scene& scene,
                      const ObjectModel& object, int max_steps, int segment) {
  if (traj.points.empty()) traj.points.push_back({state, segment});
  policy.reset(state, goal, scene, object);

  RolloutResult out;
  int contact_steps = 0;
  Pose marker = state.object;
  for (int k = 0; k < max_steps; ++k) {
    const Policy::Decision d = policy.act(state, k);
    if (d.kind == Policy::Decision::Kind::Done) {
      out.reached = goal.contains(state.object);
      if (!out.reached) out.failure = "goal_missed";
      return out;
    }
    if (d.kind == Policy::Decision::Kind::Fail) {
      out.failure = d.reason;
      return out;
    }

    const Eigen::Vector3d before = state.gripper.pose.p;
    const StepResult res = step(state, d.action, scene, object);
    if (res.fault) {
      out.failure = *res.fault;
      return out;
    }
    state = res.state;
    traj.actions.push_back(d.action);
    traj.points.push_back({state, segment});
    ++out.steps;

    if (d.action.mode == ActionMode::Free) {
      if (d.action.translation.norm() > 1e-12 &&
          (state.gripper.pose.p - before).norm() < 1e-12) {
        out.failure = "gripper_blocked";
        return out;
      }
    } else {
      ++contact_steps;
      if (contact_steps % 50 == 0) {
        if ((state.object.p - marker.p).norm() < 1e-4 &&
            angular_distance(state.object.q, marker.q) < 1e-4) {
          out.failure = "blocked";
          return out;
        }
        marker = state.object;
      }
    }
  }
  out.failure = "step_limit";
  return out;
}

StepResult move_robot_to(const SimState& state, const GripperConfig& target,
                         const Scene& scene, const ObjectModel& object) {
  if (state.attached) return fault(state, "relocate_while_attached");

  GripperConfig goal = target;
  goal.opening = std::clamp(goal.opening, 0.0, scene.gripper.max_opening);
  for (int i = 0; i < 3; ++i) {
    if (goal.pose.p[i] < scene.gripper.workspace_min[i] - kEps ||
        goal.pose.p[i] > scene.gripper.workspace_max[i] + kEps)
      return fault(state, "relocate_unreachable");
  }
  if (gripper_collides(scene, object.box, state.object, goal, true))
    return fault(state, "relocate_unreachable");

  const double high = std::max(
      {kRelocateHeight, state.gripper.pose.p.z(), goal.pose.p.z()});
  GripperConfig w[4];
  w[0] = state.gripper;
  w[0].pose.p.z() = high;
  w[1] = goal;
  w[1].pose.p = state.gripper.pose.p;
  w[1].pose.p.z() = high;
  w[2] = goal;
  w[2].pose.p.z() = high;
  w[3] = goal;

  SimState s = state;
  for (const GripperConfig& wp : w) {
    bool arrived = false;
    for (int k = 0; k < 500 && !arrived; ++k) {
      const Eigen::Vector3d dp = wp.pose.p - s.gripper.pose.p;
      const Eigen::Vector3d dr =
          log_map(wp.pose.q * s.gripper.pose.q.inverse());
      const double dopen = wp.opening - s.gripper.opening;
      if (dp.norm() <= 1e-7 && dr.norm() <= 1e-6 && std::abs(dopen) <= 1e-9) {
        arrived = true;
        break;
      }
      const double rem = dp.norm() + dr.norm() + std::abs(dopen);

      Action a;
      a.mode = ActionMode::Free;
      a.translation = dp.norm() > kMaxStepTranslation
                          ? Eigen::Vector3d(kMaxStepTranslation / dp.norm() * dp)
                          : dp;
      a.rotation = dr.norm() > kMaxStepRotation
                       ? Eigen::Vector3d(kMaxStepRotation / dr.norm() * dr)
                       : dr;
      a.opening = wp.opening;
      const StepResult res = step(s, a, scene, object);
      if (res.fault) return fault(state, *res.fault);
      s = res.state;

      const double rem2 =
          (wp.pose.p - s.gripper.pose.p).norm() +
          log_map(wp.pose.q * s.gripper.pose.q.inverse()).norm() +
          std::abs(wp.opening - s.gripper.opening);
      if (rem - rem2 < 1e-12) return fault(state, "relocate_blocked");
    }
    if (!arrived) return fault(state, "relocate_blocked");
  }
  StepResult out;
  out.state = s;
  return out;
}

}  // namespace extman
