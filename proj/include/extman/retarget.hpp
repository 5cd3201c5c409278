#pragma once

#include <string>
#include <vector>

#include "extman/contact.hpp"
#include "extman/geometry.hpp"
#include "extman/scene.hpp"
#include "extman/solver.hpp"

namespace extman {

// A recorded manipulation episode: object keyframes in the demo scene plus
// the segmentation into primitive skills.
struct Demo {
  Scene scene;
  ObjectModel object;
  std::vector<Pose> keyframes;
  std::vector<double> times;
  std::vector<std::string> labels;      // primitive per segment
  std::vector<int> switch_indices;      // keyframe ending each segment
  Pose final_goal = Pose::identity();

  int segments() const { return static_cast<int>(labels.size()); }
};

Demo demo_from_json_text(const std::string& text);
Demo load_demo(const std::string& path);
std::string demo_to_json_text(const Demo& demo);
void save_demo(const Demo& demo, const std::string& path);

struct GoalRegion {
  Pose center = Pose::identity();
  double pos_radius = 0.010;
  double ang_radius = 5.0 * M_PI / 180.0;
  bool contains(const Pose& x) const;
};

EnvContact primitive_env_contact(const std::string& primitive);
RobotContact primitive_robot_contact(const std::string& primitive);

// Environment contact that must hold at the state ending segment i. The
// boundary takes the stricter of the adjacent segments; a grasp ends free.
EnvContact switch_env_contact(const Demo& demo, int i);

// Demo start pose followed by the pose ending each segment.
std::vector<Pose> demo_switch_poses(const Demo& demo);

// Chain the demo's switch-to-switch motion onto a new start pose. Bitwise
// identical to the demo poses when the start matches the demo start.
std::vector<Pose> remap_switches(const Demo& demo, const Pose& start);

// Nearest pose to the target that holds the contact, clears obstacles and
// stays inside the workspace.
SolveResult retarget_switch(const Scene& scene, const Cuboid& box,
                            const Pose& target, EnvContact contact,
                            const SolverConfig& cfg = {});

struct SwitchGoal {
  GoalRegion region;
  EnvContact env = EnvContact::Ground;
  RobotContact next_robot = RobotContact::None;  // needed by the next segment
  std::string primitive;                         // segment ending here
  double solve_violation = 0.0;
};

// Remap then project every switch in order, chaining each segment's motion
// from the projected previous switch. With ablate the projection is skipped
// and the raw chained poses are used. Throws InfeasibleError with the index
// of the first switch that cannot be placed.
std::vector<SwitchGoal> build_goal_sequence(const Demo& demo, const Scene& scene,
                                            const Cuboid& box, const Pose& start,
                                            bool ablate = false,
                                            const SolverConfig& cfg = {});

}  // namespace extman
