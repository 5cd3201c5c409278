#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "extman/contact.hpp"
#include "extman/geometry.hpp"
#include "extman/retarget.hpp"
#include "extman/scene.hpp"

namespace extman {

inline constexpr double kMaxStepTranslation = 0.005;
inline constexpr double kMaxStepRotation = 2.0 * M_PI / 180.0;
inline constexpr double kRelocateHeight = 0.4;  // clears wall and obstacles

// How a commanded motion couples gripper and object.
//   Free: gripper moves alone, object untouched.
//   Push: sticky planar object motion (side or top press), gripper co-moves.
//   Pivot: object rotates about the wall lateral axis, contacts maintained.
//   Attached: object rigidly follows the gripper.
enum class ActionMode { Free = 0, Push = 1, Pivot = 2, Attached = 3 };

std::string to_string(ActionMode m);
ActionMode action_mode_from_string(const std::string& s);

struct Action {
  ActionMode mode = ActionMode::Free;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // <= 5 mm
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();     // axis-angle, <= 2 deg
  std::optional<double> opening;
  bool attach = false;
  bool release = false;
};

struct SimState {
  Pose object = Pose::identity();
  GripperConfig gripper;
  bool attached = false;
};

SimState initial_state(const Scene& scene, const Pose& object);

struct StepResult {
  SimState state;
  double clip = 1.0;                  // executed fraction of the command
  std::optional<std::string> fault;   // set when the command was invalid
};

// Quasi-static no-slip update. Commands that would penetrate are clipped
// by bisection; invalid commands leave the state unchanged and set fault.
// A free step that does not touch the object leaves it bitwise unchanged.
StepResult step(const SimState& state, const Action& action, const Scene& scene,
                const ObjectModel& object);

// Gravity relaxation for an unheld object: topple about the lowest ground
// edge to the nearest stable face, then snap onto the ground and out of the
// wall. Freestanding poses are returned bitwise unchanged.
Pose settle(const Scene& scene, const Cuboid& box, const Pose& pose);

struct TrajectoryPoint {
  SimState state;
  int segment = 0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<Action> actions;
};

class Policy;

struct RolloutResult {
  bool reached = false;
  std::optional<std::string> failure;
  int steps = 0;
};

// Run one policy until it reports done or fails. Success is membership of
// the final object pose in the goal region, nothing else. Watches for
// contact steps that stop making progress.
RolloutResult rollout(Policy& policy, SimState& state, Trajectory& traj,
                      const GoalRegion& goal, const Scene& scene,
                      const ObjectModel& object, int max_steps, int segment);

// Relocate the gripper between primitives: lift to a clearance height,
// reorient and translate up there, then descend onto the target. The object
// is never touched, so its pose is bitwise unchanged on success. Faults:
// relocate_while_attached, relocate_unreachable, relocate_blocked.
StepResult move_robot_to(const SimState& state, const GripperConfig& target,
                         const Scene& scene, const ObjectModel& object);

}  // namespace extman
