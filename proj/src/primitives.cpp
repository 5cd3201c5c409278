#include "extman/primitives.hpp"

#include <algorithm>
#include <cmath>

#include "extman/errors.hpp"

namespace extman {

namespace {

Eigen::Vector3d clamp_step(const Eigen::Vector3d& v, double limit) {
  const double n = v.norm();
  if (n <= limit) return v;
  return v * (limit / n);
}

double clamp_mag(double v, double limit) {
  return std::clamp(v, -limit, limit);
}

bool near_pose(const Pose& a, const Pose& b, double pos_eps, double ang_eps) {
  return (a.p - b.p).norm() <= pos_eps && angular_distance(a.q, b.q) <= ang_eps;
}

// Yaw taking the goal orientation from the current one, assuming both are
// ground poses differing by a rotation about z.
double yaw_error(const Pose& current, const Pose& goal) {
  const Eigen::Quaterniond rel =
      normalized_lazy(goal.q * current.q.conjugate());
  return log_map(rel).z();
}

GripperConfig tip_waypoint(const Eigen::Vector3d& tip, const Eigen::Quaterniond& q,
                           double opening, double finger_length) {
  GripperConfig cfg;
  cfg.pose.q = q;
  cfg.pose.p = tip - q * Eigen::Vector3d(0.0, 0.0, finger_length);
  cfg.opening = opening;
  return cfg;
}

const Eigen::Quaterniond kDown(0.0, 1.0, 0.0, 0.0);

// Reorienting while low lets the fingertip arc clip the ground or the object,
// so approaches climb first, rotate at altitude, then descend onto the target.
void add_aligned_descent(GripperRoute& route, const SimState& state,
                         const GripperConfig& target, double safe_z) {
  const double high = std::max(safe_z, state.gripper.pose.p.z());
  if (high > state.gripper.pose.p.z() + 1e-9) {
    GripperConfig rise;
    rise.pose = state.gripper.pose;
    rise.pose.p.z() = high;
    rise.opening = state.gripper.opening;
    route.add(rise);
  }
  GripperConfig align = target;
  align.pose.p = state.gripper.pose.p;
  align.pose.p.z() = high;
  route.add(align);
  GripperConfig over = target;
  over.pose.p.z() = high;
  route.add(over);
  route.add(target);
}

}  // namespace

void GripperRoute::clear() {
  waypoints_.clear();
  index_ = 0;
}

void GripperRoute::add(const GripperConfig& waypoint) {
  waypoints_.push_back(waypoint);
}

bool GripperRoute::finished(const SimState& state) const {
  size_t i = index_;
  while (i < waypoints_.size()) {
    const GripperConfig& wp = waypoints_[i];
    if ((wp.pose.p - state.gripper.pose.p).norm() > 1e-7 ||
        angular_distance(wp.pose.q, state.gripper.pose.q) > 1e-6 ||
        std::abs(wp.opening - state.gripper.opening) > 1e-9)
      return false;
    ++i;
  }
  return true;
}

Action GripperRoute::next(const SimState& state) {
  while (index_ < waypoints_.size()) {
    const GripperConfig& wp = waypoints_[index_];
    if ((wp.pose.p - state.gripper.pose.p).norm() <= 1e-7 &&
        angular_distance(wp.pose.q, state.gripper.pose.q) <= 1e-6 &&
        std::abs(wp.opening - state.gripper.opening) <= 1e-9) {
      ++index_;
      continue;
    }
    Action a;
    a.mode = ActionMode::Free;
    a.translation =
        clamp_step(wp.pose.p - state.gripper.pose.p, kMaxStepTranslation);
    const Eigen::Quaterniond rel =
        normalized_lazy(wp.pose.q * state.gripper.pose.q.conjugate());
    a.rotation = clamp_step(log_map(rel), kMaxStepRotation);
    a.opening = wp.opening;
    return a;
  }
  return Action{};
}

void PushPolicy::reset(const SimState&, const GoalRegion& goal,
                       const Scene& scene, const ObjectModel& object) {
  goal_ = goal;
  scene_ = scene;
  object_ = object;
  route_.clear();
  phase_ = Phase::Select;
}

Policy::Decision PushPolicy::act(const SimState& state, int) {
  const GripperModel& model = scene_.gripper;
  if (phase_ == Phase::Select) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    const Pose& x = state.object;
    if (near_pose(x, goal_.center, kDonePosEps, kDoneAngEps)) {
      phase_ = Phase::Finished;
      return Decision::done();
    }
    Eigen::Vector3d dir = goal_.center.p - x.p;
    dir.z() = 0.0;
    if (dir.norm() < 1e-9) dir = Eigen::Vector3d::UnitX();
    const Eigen::Vector3d dirh = dir.normalized();

    const Eigen::Matrix3d rot = x.q.toRotationMatrix();
    int up_axis = 0;
    double up_best = -2.0;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(rot(2, i)) > up_best) {
        up_best = std::abs(rot(2, i));
        up_axis = i;
      }
    }
    int face_axis = -1;
    double face_sign = 1.0;
    double best = 2.0;
    for (int i = 0; i < 3; ++i) {
      if (i == up_axis) continue;
      for (double s : {-1.0, 1.0}) {
        const double a = (s * rot.col(i)).dot(dirh);
        if (a < best) {
          best = a;
          face_axis = i;
          face_sign = s;
        }
      }
    }
    const Eigen::Vector3d n = face_sign * rot.col(face_axis);
    Eigen::Vector3d nh = n;
    nh.z() = 0.0;
    press_normal_ = nh.norm() > 1e-9 ? nh.normalized() : -dirh;
    const Eigen::Vector3d press = x.p + object_.box.half[face_axis] * n;

    const double yaw = std::atan2(press_normal_.y(), press_normal_.x()) + M_PI / 2.0;
    const Eigen::Quaterniond qg =
        normalized_lazy(Pose::rot_z(yaw).q * kDown);

    const Eigen::Vector3d standoff = press + 0.03 * press_normal_;
    Eigen::Vector3d high = standoff;
    high.z() = 0.25;
    route_.clear();
    route_.add(tip_waypoint(high, qg, 0.0, model.finger_length));
    route_.add(tip_waypoint(standoff, qg, 0.0, model.finger_length));
    route_.add(tip_waypoint(press, qg, 0.0, model.finger_length));
    phase_ = Phase::Approach;
  }
  if (phase_ == Phase::Approach) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    phase_ = Phase::Pushing;
  }
  if (phase_ == Phase::Pushing) {
    const Pose& x = state.object;
    Eigen::Vector3d rem = goal_.center.p - x.p;
    rem.z() = 0.0;
    const double yerr = yaw_error(x, goal_.center);
    if (rem.norm() <= kDonePosEps && std::abs(yerr) <= kDoneAngEps) {
      GripperConfig up = state.gripper;
      up.pose.p.z() += 0.10;
      route_.clear();
      route_.add(up);
      phase_ = Phase::Retract;
    } else if (rem.norm() > kDonePosEps &&
               std::acos(std::clamp(rem.normalized().dot(-press_normal_), -1.0,
                                    1.0)) > kHeadingLimit) {
      // Direction drifted off the pressed face; lift and pick a new face.
      GripperConfig up = state.gripper;
      up.pose.p.z() += 0.15;
      route_.clear();
      route_.add(up);
      phase_ = Phase::Select;
      return Decision::act(route_.next(state));
    } else {
      Action a;
      a.mode = ActionMode::Push;
      a.translation = clamp_step(rem, kMaxStepTranslation);
      a.rotation = Eigen::Vector3d(0.0, 0.0, clamp_mag(yerr, kMaxStepRotation));
      return Decision::act(a);
    }
  }
  if (phase_ == Phase::Retract) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    phase_ = Phase::Finished;
  }
  return Decision::done();
}

void PullPolicy::reset(const SimState& state, const GoalRegion& goal,
                       const Scene& scene, const ObjectModel& object) {
  goal_ = goal;
  scene_ = scene;
  object_ = object;
  route_.clear();
  phase_ = Phase::Approach;
  at_goal_on_reset_ =
      near_pose(state.object, goal.center, kDonePosEps, kDoneAngEps);
  if (at_goal_on_reset_) return;

  const GripperConfig press = top_contact(object.box, state.object, scene.gripper);
  GripperConfig above = press;
  above.pose.p.z() += 0.05;
  route_.add(above);
  route_.add(press);
}

Policy::Decision PullPolicy::act(const SimState& state, int) {
  if (at_goal_on_reset_) return Decision::done();
  if (phase_ == Phase::Approach) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    phase_ = Phase::Pulling;
  }
  if (phase_ == Phase::Pulling) {
    const Pose& x = state.object;
    Eigen::Vector3d rem = goal_.center.p - x.p;
    rem.z() = 0.0;
    const double yerr = yaw_error(x, goal_.center);
    if (rem.norm() <= kDonePosEps && std::abs(yerr) <= kDoneAngEps) {
      GripperConfig up = state.gripper;
      up.pose.p.z() += 0.10;
      route_.clear();
      route_.add(up);
      phase_ = Phase::Retract;
    } else {
      Action a;
      a.mode = ActionMode::Push;
      a.translation = clamp_step(rem, kMaxStepTranslation);
      a.rotation = Eigen::Vector3d(0.0, 0.0, clamp_mag(yerr, kMaxStepRotation));
      return Decision::act(a);
    }
  }
  if (phase_ == Phase::Retract) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    phase_ = Phase::Finished;
  }
  return Decision::done();
}

void PivotPolicy::reset(const SimState& state, const GoalRegion& goal,
                        const Scene& scene, const ObjectModel& object) {
  goal_ = goal;
  scene_ = scene;
  object_ = object;
  route_.clear();
  fail_reason_.clear();
  phase_ = Phase::Approach;
  theta_done_ = 0.0;
  at_goal_on_reset_ =
      near_pose(state.object, goal.center, 1e-3, kDoneAngEps);
  if (at_goal_on_reset_) return;

  if (!scene.wall) {
    fail_reason_ = "pivot_without_wall";
    return;
  }
  axis_ = wall_lateral(scene);
  const Eigen::Quaterniond rel =
      normalized_lazy(goal.center.q * state.object.q.conjugate());
  const Eigen::Vector3d w = log_map(rel);
  theta_total_ = w.dot(axis_);
  if ((w - theta_total_ * axis_).norm() > 0.05) {
    fail_reason_ = "pivot_goal_off_axis";
    return;
  }

  const GripperConfig press =
      antipodal_config(scene, object.box, state.object, scene.gripper);
  const Eigen::Vector3d tip =
      press.pose.apply(Eigen::Vector3d(0, 0, scene.gripper.finger_length));

  // Per-step angle keeps the fingertip arc within the translation bound.
  const auto pts = corners(object.box, state.object);
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
  double radius = 0.0;
  if (edge.norm() > 1e-9) {
    edge.normalize();
    const Eigen::Vector3d d = tip - pts[lo0];
    radius = (d - d.dot(edge) * edge).norm();
  } else {
    radius = (tip - pts[lo0]).norm();
  }
  theta_step_ =
      std::min(kMaxStepRotation, kMaxStepTranslation / std::max(radius, 1e-6));

  GripperConfig standoff = press;
  standoff.pose.p += 0.05 * wall_plane(scene).normal;
  double top = pts[0].z();
  for (int i = 1; i < 8; ++i) top = std::max(top, pts[i].z());
  add_aligned_descent(route_, state, standoff,
                      top + scene.gripper.finger_length + 0.03);
  route_.add(press);
}

Policy::Decision PivotPolicy::act(const SimState& state, int) {
  if (!fail_reason_.empty()) return Decision::fail(fail_reason_);
  if (at_goal_on_reset_) return Decision::done();
  if (phase_ == Phase::Approach) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    phase_ = Phase::Pivoting;
  }
  if (phase_ == Phase::Pivoting) {
    const double rem = theta_total_ - theta_done_;
    // The retargeted goal may sit a little further along the wall than a pure
    // rotation reaches, so feed back the slide along the contact line too.
    const double lat_err = (goal_.center.p - state.object.p).dot(axis_);
    if (std::abs(rem) <= 1e-9 && std::abs(lat_err) <= 0.5 * kDonePosEps) {
      if (angular_distance(state.object.q, goal_.center.q) > 10.0 * kDoneAngEps ||
          (state.object.p - goal_.center.p).norm() > 1e-3)
        return Decision::fail("pivot_missed");
      GripperConfig up = state.gripper;
      up.pose.p.z() += 0.10;
      route_.clear();
      route_.add(up);
      phase_ = Phase::Retract;
    } else {
      const double dtheta = clamp_mag(rem, theta_step_);
      theta_done_ += dtheta;
      Action a;
      a.mode = ActionMode::Pivot;
      a.rotation = dtheta * axis_;
      // Slide only once upright; mid-rotation the swept corners are at their
      // widest and a lateral push can clip a nearby obstacle.
      if (std::abs(rem) <= 1e-9)
        a.translation = clamp_mag(lat_err, kMaxStepTranslation) * axis_;
      return Decision::act(a);
    }
  }
  if (phase_ == Phase::Retract) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    phase_ = Phase::Finished;
  }
  return Decision::done();
}

void GraspPolicy::reset(const SimState& state, const GoalRegion& goal,
                        const Scene& scene, const ObjectModel& object) {
  goal_ = goal;
  scene_ = scene;
  object_ = object;
  route_.clear();
  fail_reason_.clear();
  phase_ = Phase::Approach;
  at_goal_on_reset_ =
      near_pose(state.object, goal.center, kDonePosEps, kDoneAngEps) &&
      state.attached;
  if (at_goal_on_reset_) return;

  GripperConfig grip;
  try {
    grip = grasp_config(scene, object.box, state.object, scene.gripper);
  } catch (const TooWideError&) {
    fail_reason_ = "too_wide";
    return;
  } catch (const NoClearanceError&) {
    fail_reason_ = "no_clearance";
    return;
  }
  const auto tips = fingertips(scene.gripper, grip);
  if (!scene.gripper.in_workspace(grip.pose.p) ||
      !scene.gripper.in_workspace(tips[0]) ||
      !scene.gripper.in_workspace(tips[1])) {
    fail_reason_ = "workspace";
    return;
  }
  close_opening_ = grip.opening - kGraspSlack;

  GripperConfig above = grip;
  above.pose.p.z() += 0.10;
  route_.add(above);
  route_.add(grip);
}

Policy::Decision GraspPolicy::act(const SimState& state, int) {
  if (!fail_reason_.empty()) return Decision::fail(fail_reason_);
  if (at_goal_on_reset_) return Decision::done();
  if (phase_ == Phase::Approach) {
    if (!route_.finished(state)) return Decision::act(route_.next(state));
    phase_ = Phase::Close;
  }
  if (phase_ == Phase::Close) {
    phase_ = Phase::Lift;
    Action a;
    a.mode = ActionMode::Free;
    a.opening = close_opening_;
    a.attach = true;
    return Decision::act(a);
  }
  if (phase_ == Phase::Lift) {
    const Eigen::Vector3d rem = goal_.center.p - state.object.p;
    if (rem.norm() <= kDonePosEps &&
        angular_distance(state.object.q, goal_.center.q) <= kDoneAngEps) {
      phase_ = Phase::Finished;
      return Decision::done();
    }
    Action a;
    a.mode = ActionMode::Attached;
    a.translation = clamp_step(rem, kMaxStepTranslation);
    return Decision::act(a);
  }
  return Decision::done();
}

std::unique_ptr<Policy> make_policy(const std::string& primitive) {
  if (primitive == "push") return std::make_unique<PushPolicy>();
  if (primitive == "pull") return std::make_unique<PullPolicy>();
  if (primitive == "pivot") return std::make_unique<PivotPolicy>();
  if (primitive == "grasp") return std::make_unique<GraspPolicy>();
  throw ParseError("unknown primitive '" + primitive + "'");
}

}  // namespace extman
