#include "extman/sim.hpp"

#include <cmath>
#include <vector>

#include <doctest.h>

#include "test_support.hpp"

using namespace extman;
using testsup::box3;
using testsup::wall_scene;

namespace {

const Cuboid kBox = box3(0.100, 0.075, 0.030);

ObjectModel object_of(const Cuboid& box) {
  ObjectModel m;
  m.box = box;
  return m;
}

Pose flat(double x, double y) {
  Pose p;
  p.p = Eigen::Vector3d(x, y, 0.030);
  return p;
}

// Closed gripper whose coincident tips sit exactly at a given point,
// fingers hanging straight down.
GripperConfig tip_at(const Eigen::Vector3d& tip, double finger_length) {
  GripperConfig cfg;
  cfg.pose.q = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);
  cfg.pose.p = tip + Eigen::Vector3d(0.0, 0.0, finger_length);
  cfg.opening = 0.0;
  return cfg;
}

Action push_step(double dx, double dy, double dyaw = 0.0) {
  Action a;
  a.mode = ActionMode::Push;
  a.translation = Eigen::Vector3d(dx, dy, 0.0);
  a.rotation = Eigen::Vector3d(0.0, 0.0, dyaw);
  return a;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("free motion leaves the object bitwise untouched") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.5, 0.0));
  const Pose before = state.object;
  for (int k = 0; k < 20; ++k) {
    Action a;
    a.translation = Eigen::Vector3d(0.004, -0.002, 0.001);
    a.rotation = Eigen::Vector3d(0.0, 0.0, 0.01);
    const StepResult r = step(state, a, s, obj);
    REQUIRE_FALSE(r.fault.has_value());
    CHECK(r.clip == 1.0);
    state = r.state;
    CHECK(bitwise_equal(state.object, before));
  }
  CHECK((state.gripper.pose.p -
         (Eigen::Vector3d(0.3, 0.0, 0.4) + 20 * Eigen::Vector3d(0.004, -0.002, 0.001)))
            .norm() < 1e-12);
}

TEST_CASE("oversized commands fault without moving anything") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  const SimState state = initial_state(s, flat(0.5, 0.0));

  Action big;
  big.translation = Eigen::Vector3d(0.006, 0.0, 0.0);
  StepResult r = step(state, big, s, obj);
  REQUIRE(r.fault.has_value());
  CHECK(*r.fault == "action_bounds");
  CHECK(bitwise_equal(r.state.gripper.pose, state.gripper.pose));

  Action spin;
  spin.rotation = Eigen::Vector3d(0.0, 0.0, 3.0 * M_PI / 180.0);
  r = step(state, spin, s, obj);
  REQUIRE(r.fault.has_value());
  CHECK(*r.fault == "action_bounds");
}

TEST_CASE("free motion stops at the object surface") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.5, 0.0));
  // tip 1 mm above the top face, command 5 mm straight down
  state.gripper = tip_at(Eigen::Vector3d(0.5, 0.0, 0.061), s.gripper.finger_length);
  Action down;
  down.translation = Eigen::Vector3d(0.0, 0.0, -0.005);
  const StepResult r = step(state, down, s, obj);
  REQUIRE_FALSE(r.fault.has_value());
  CHECK(r.clip < 1.0);
  CHECK(r.clip > 0.1);
  const Eigen::Vector3d tip =
      fingertips(s.gripper, r.state.gripper)[0];
  CHECK(tip.z() >= 0.060 - 1e-7);
  CHECK(tip.z() < 0.0605);
  CHECK(bitwise_equal(r.state.object, state.object));
}

TEST_CASE("a side press carries the object exactly with the gripper") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.5, 0.0));
  state.gripper = tip_at(Eigen::Vector3d(0.4, 0.0, 0.03), s.gripper.finger_length);

  const Eigen::Vector3d t(0.005, 0.0, 0.0);
  const Eigen::Vector3d op = state.object.p;
  const Eigen::Vector3d gp = state.gripper.pose.p;
  const StepResult r = step(state, push_step(t.x(), t.y()), s, obj);
  REQUIRE_FALSE(r.fault.has_value());
  CHECK(r.clip == 1.0);
  CHECK((r.state.object.p - (op + t)).norm() == 0.0);
  CHECK((r.state.gripper.pose.p - (gp + t)).norm() < 1e-12);
  CHECK((r.state.object.q.coeffs() - state.object.q.coeffs()).norm() == 0.0);
}

TEST_CASE("a push into the wall clips flush") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.6475, 0.0));  // 2.5 mm of slack
  state.gripper = tip_at(Eigen::Vector3d(0.5475, 0.0, 0.03), s.gripper.finger_length);
  const StepResult r = step(state, push_step(0.005, 0.0), s, obj);
  REQUIRE_FALSE(r.fault.has_value());
  CHECK(r.clip < 1.0);
  CHECK(r.clip > 0.4);
  CHECK(std::abs(wall_min_corner_distance(s, kBox, r.state.object)) < 1e-8);
  CHECK(r.state.object.p.x() == doctest::Approx(0.65).epsilon(1e-9));
}

TEST_CASE("push preconditions fault cleanly") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState pressed = initial_state(s, flat(0.5, 0.0));
  pressed.gripper = tip_at(Eigen::Vector3d(0.4, 0.0, 0.03), s.gripper.finger_length);

  SimState held = pressed;
  held.attached = true;
  CHECK(*step(held, push_step(0.005, 0.0), s, obj).fault ==
        "planar_step_while_attached");

  Action off_level = push_step(0.004, 0.0);
  off_level.translation.z() = 0.001;
  CHECK(*step(pressed, off_level, s, obj).fault == "planar_step_off_level");

  Action roll = push_step(0.004, 0.0);
  roll.rotation = Eigen::Vector3d(0.01, 0.0, 0.0);
  CHECK(*step(pressed, roll, s, obj).fault == "planar_rotation_not_yaw");

  SimState far = initial_state(s, flat(0.5, 0.0));
  CHECK(*step(far, push_step(0.005, 0.0), s, obj).fault ==
        "press_contact_missing");

  SimState lifted = pressed;
  lifted.object.p.z() += 0.01;
  lifted.gripper.pose.p.z() += 0.01;  // keep the press contact
  CHECK(*step(lifted, push_step(0.005, 0.0), s, obj).fault ==
        "planar_step_off_ground");

  SimState tilted = initial_state(s, flat(0.5, 0.0));
  tilted.object.q = Pose::rot_y(5.0 * M_PI / 180.0).q;
  tilted.object.p.z() -= ground_residual(kBox, tilted.object);
  const Eigen::Vector3d face = tilted.object.apply(Eigen::Vector3d(-0.1, 0.0, 0.0));
  tilted.gripper = tip_at(face, s.gripper.finger_length);
  CHECK(*step(tilted, push_step(0.005, 0.0), s, obj).fault ==
        "object_not_freestanding");
}

TEST_CASE("a pivot script tips the box upright on the wall") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.65, 0.0));
  state.gripper = tip_at(Eigen::Vector3d(0.55, 0.0, 0.03), s.gripper.finger_length);

  const double dtheta = 2.0 * M_PI / 180.0;
  for (int k = 0; k < 45; ++k) {
    Action a;
    a.mode = ActionMode::Pivot;
    a.rotation = Eigen::Vector3d(0.0, dtheta, 0.0);
    const StepResult r = step(state, a, s, obj);
    REQUIRE_FALSE(r.fault.has_value());
    state = r.state;
    CHECK(std::abs(wall_min_corner_distance(s, kBox, state.object)) < 1e-9);
    CHECK(std::abs(ground_residual(kBox, state.object)) < 1e-9);
  }
  Pose want = Pose::rot_y(M_PI / 2.0);
  want.p = Eigen::Vector3d(0.72, 0.0, 0.10);
  CHECK((state.object.p - want.p).norm() < 1e-6);
  CHECK(angular_distance(state.object.q, want.q) < 1e-6);
}

TEST_CASE("pivot preconditions fault cleanly") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState flush = initial_state(s, flat(0.65, 0.0));
  flush.gripper = tip_at(Eigen::Vector3d(0.55, 0.0, 0.03), s.gripper.finger_length);

  Action slide;
  slide.mode = ActionMode::Pivot;
  slide.translation = Eigen::Vector3d(0.002, 0.0, 0.0);  // along the wall normal
  CHECK(*step(flush, slide, s, obj).fault == "pivot_translation_off_axis");

  Action tumble;
  tumble.mode = ActionMode::Pivot;
  tumble.rotation = Eigen::Vector3d(0.001, 0.02, 0.0);
  CHECK(*step(flush, tumble, s, obj).fault == "pivot_rotation_off_axis");

  Action ok;
  ok.mode = ActionMode::Pivot;
  ok.rotation = Eigen::Vector3d(0.0, 0.02, 0.0);

  SimState away = initial_state(s, flat(0.50, 0.0));
  away.gripper = tip_at(Eigen::Vector3d(0.40, 0.0, 0.03), s.gripper.finger_length);
  CHECK(*step(away, ok, s, obj).fault == "pivot_without_wall_contact");

  SimState nohand = initial_state(s, flat(0.65, 0.0));
  CHECK(*step(nohand, ok, s, obj).fault == "pivot_without_finger_contact");

  Scene open = s;
  open.wall.reset();
  CHECK(*step(flush, ok, open, obj).fault == "pivot_without_wall");
}

TEST_CASE("attach requires contact and then carries the object") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.5, 0.0));

  Action grab;
  grab.attach = true;
  CHECK(*step(state, grab, s, obj).fault == "attach_without_contact");

  state.gripper = tip_at(Eigen::Vector3d(0.5, 0.0, 0.06), s.gripper.finger_length);
  StepResult r = step(state, grab, s, obj);
  REQUIRE_FALSE(r.fault.has_value());
  CHECK(r.state.attached);
  state = r.state;

  const Eigen::Vector3d op = state.object.p;
  for (int k = 0; k < 10; ++k) {
    Action lift;
    lift.mode = ActionMode::Attached;
    lift.translation = Eigen::Vector3d(0.0, 0.0, 0.005);
    r = step(state, lift, s, obj);
    REQUIRE_FALSE(r.fault.has_value());
    state = r.state;
  }
  CHECK((state.object.p - (op + Eigen::Vector3d(0.0, 0.0, 0.05))).norm() < 1e-12);

  Action drop;
  drop.release = true;
  r = step(state, drop, s, obj);
  REQUIRE_FALSE(r.fault.has_value());
  CHECK_FALSE(r.state.attached);
  CHECK(r.state.object.p.z() == doctest::Approx(0.03).epsilon(1e-9));
  CHECK(is_freestanding(s, kBox, r.state.object, 1e-6));
}

TEST_CASE("attached mode without an attachment faults") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  const SimState state = initial_state(s, flat(0.5, 0.0));
  Action a;
  a.mode = ActionMode::Attached;
  a.translation = Eigen::Vector3d(0.0, 0.0, 0.005);
  CHECK(*step(state, a, s, obj).fault == "not_attached");
}

TEST_CASE("settle snaps a tilted box flat and keeps a resting box bitwise") {
  const Scene s = wall_scene(0.75, 0.0);
  const Pose rest = flat(0.5, 0.0);
  CHECK(bitwise_equal(settle(s, kBox, rest), rest));

  Pose tilted = rest;
  tilted.q = Pose::rot_y(8.0 * M_PI / 180.0).q;
  tilted.p.z() -= ground_residual(kBox, tilted);
  const Pose settled = settle(s, kBox, tilted);
  CHECK(is_freestanding(s, kBox, settled, 1e-6));
  CHECK(settled.p.z() == doctest::Approx(0.03).epsilon(1e-9));
}

TEST_CASE("relocation lands on the target without touching the object") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.5, 0.0));

  GripperConfig target;
  target.pose.p = Eigen::Vector3d(0.41, -0.15, 0.23);
  target.pose.q = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);
  target.opening = 0.05;
  const StepResult r = move_robot_to(state, target, s, obj);
  REQUIRE_FALSE(r.fault.has_value());
  CHECK(bitwise_equal(r.state.object, state.object));
  CHECK((r.state.gripper.pose.p - target.pose.p).norm() < 1e-6);
  CHECK(angular_distance(r.state.gripper.pose.q, target.pose.q) < 1e-5);
  CHECK(r.state.gripper.opening == doctest::Approx(0.05).epsilon(1e-8));
}

TEST_CASE("relocation faults") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.5, 0.0));

  GripperConfig target;
  target.pose.q = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);

  SimState held = state;
  held.attached = true;
  target.pose.p = Eigen::Vector3d(0.4, 0.0, 0.3);
  CHECK(*move_robot_to(held, target, s, obj).fault == "relocate_while_attached");

  target.pose.p = Eigen::Vector3d(0.4, 0.0, -0.05);
  CHECK(*move_robot_to(state, target, s, obj).fault == "relocate_unreachable");

  target.pose.p = Eigen::Vector3d(1.4, 0.0, 0.3);
  CHECK(*move_robot_to(state, target, s, obj).fault == "relocate_unreachable");

  // palm inside the object counts as unreachable, not blocked
  target.pose.p = Eigen::Vector3d(0.5, 0.0, 0.02);
  CHECK(*move_robot_to(state, target, s, obj).fault == "relocate_unreachable");
}

TEST_CASE("relocation cannot tunnel a tall obstacle") {
  Scene s = wall_scene(0.75, 0.0);
  Obstacle tower;
  tower.name = "tower";
  tower.box = box3(0.05, 0.05, 0.25);
  tower.center_xy = Eigen::Vector2d(0.55, 0.0);
  s.obstacles = {tower};
  const ObjectModel obj = object_of(kBox);
  SimState state = initial_state(s, flat(0.3, 0.0));
  state.gripper.pose.p = Eigen::Vector3d(0.35, 0.0, 0.3);

  GripperConfig target;
  target.pose.q = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);
  target.pose.p = Eigen::Vector3d(0.7, 0.0, 0.3);
  const StepResult r = move_robot_to(state, target, s, obj);
  REQUIRE(r.fault.has_value());
  CHECK(*r.fault == "relocate_blocked");
  CHECK(bitwise_equal(r.state.object, state.object));
}

TEST_CASE("identical action streams replay bitwise") {
  const Scene s = wall_scene(0.75, 0.0);
  const ObjectModel obj = object_of(kBox);

  auto run = [&]() {
    SimState state = initial_state(s, flat(0.65, 0.0));
    state.gripper = tip_at(Eigen::Vector3d(0.55, 0.0, 0.03), s.gripper.finger_length);
    for (int k = 0; k < 45; ++k) {
      Action a;
      a.mode = ActionMode::Pivot;
      a.rotation = Eigen::Vector3d(0.0, 2.0 * M_PI / 180.0, 0.0);
      state = step(state, a, s, obj).state;
    }
    testsup::Rng rng(5);
    for (int k = 0; k < 200; ++k) {
      Action a;
      a.translation = Eigen::Vector3d(rng.uni(-0.004, 0.004), rng.uni(-0.004, 0.004),
                                      rng.uni(-0.002, 0.004));
      a.rotation = Eigen::Vector3d(0.0, 0.0, rng.uni(-0.03, 0.03));
      state = step(state, a, s, obj).state;
    }
    return state;
  };
  const SimState a = run();
  const SimState b = run();
  CHECK(bitwise_equal(a.object, b.object));
  CHECK(bitwise_equal(a.gripper.pose, b.gripper.pose));
  CHECK(a.gripper.opening == b.gripper.opening);
}

}  // TEST_SUITE
