#pragma once

#include <memory>
#include <string>
#include <vector>

#include "extman/contact.hpp"
#include "extman/retarget.hpp"
#include "extman/scene.hpp"
#include "extman/sim.hpp"

namespace extman {

inline constexpr double kDonePosEps = 1e-4;
inline constexpr double kDoneAngEps = 0.05 * M_PI / 180.0;
inline constexpr double kHeadingLimit = 15.0 * M_PI / 180.0;

// Feedback skill driving one demo segment. reset() binds it to a goal,
// act() emits one bounded action at a time.
class Policy {
 public:
  struct Decision {
    enum class Kind { Act, Done, Fail };
    Kind kind = Kind::Done;
    Action action;
    std::string reason;

    static Decision act(const Action& a) { return {Kind::Act, a, {}}; }
    static Decision done() { return {Kind::Done, {}, {}}; }
    static Decision fail(std::string r) { return {Kind::Fail, {}, std::move(r)}; }
  };

  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void reset(const SimState& state, const GoalRegion& goal,
                     const Scene& scene, const ObjectModel& object) = 0;
  virtual Decision act(const SimState& state, int step) = 0;
};

// Straight-line gripper waypoint follower used by the approach and retract
// phases. Emits free-space actions within the per-step bounds and lands on
// each waypoint exactly.
class GripperRoute {
 public:
  void clear();
  void add(const GripperConfig& waypoint);
  bool finished(const SimState& state) const;
  Action next(const SimState& state);

 private:
  std::vector<GripperConfig> waypoints_;
  size_t index_ = 0;
};

// Presses the side face opposite the travel direction and walks the object
// over the ground to the goal; re-approaches when the goal direction drifts
// away from the pressed face.
class PushPolicy : public Policy {
 public:
  std::string name() const override { return "push"; }
  void reset(const SimState& state, const GoalRegion& goal, const Scene& scene,
             const ObjectModel& object) override;
  Decision act(const SimState& state, int step) override;

 private:
  enum class Phase { Select, Approach, Pushing, Retract, Finished };
  Phase phase_ = Phase::Select;
  GoalRegion goal_;
  Scene scene_;
  ObjectModel object_;
  GripperRoute route_;
  Eigen::Vector3d press_normal_ = Eigen::Vector3d::UnitX();
};

// Presses the top face and drags the object over the ground to the goal.
class PullPolicy : public Policy {
 public:
  std::string name() const override { return "pull"; }
  void reset(const SimState& state, const GoalRegion& goal, const Scene& scene,
             const ObjectModel& object) override;
  Decision act(const SimState& state, int step) override;

 private:
  enum class Phase { Approach, Pulling, Retract, Finished };
  Phase phase_ = Phase::Approach;
  GoalRegion goal_;
  Scene scene_;
  ObjectModel object_;
  GripperRoute route_;
  bool at_goal_on_reset_ = false;
};

// Tips the object up the wall about the wall lateral axis while pressing
// the face away from the wall, until the goal orientation is reached.
class PivotPolicy : public Policy {
 public:
  std::string name() const override { return "pivot"; }
  void reset(const SimState& state, const GoalRegion& goal, const Scene& scene,
             const ObjectModel& object) override;
  Decision act(const SimState& state, int step) override;

 private:
  enum class Phase { Approach, Pivoting, Retract, Finished };
  Phase phase_ = Phase::Approach;
  GoalRegion goal_;
  Scene scene_;
  ObjectModel object_;
  GripperRoute route_;
  Eigen::Vector3d axis_ = Eigen::Vector3d::UnitY();
  double theta_total_ = 0.0;
  double theta_done_ = 0.0;
  double theta_step_ = 0.0;
  std::string fail_reason_;
  bool at_goal_on_reset_ = false;
};

// Top-down pinch across the smallest horizontal extent, then a straight
// lift to the goal height with the object attached.
class GraspPolicy : public Policy {
 public:
  std::string name() const override { return "grasp"; }
  void reset(const SimState& state, const GoalRegion& goal, const Scene& scene,
             const ObjectModel& object) override;
  Decision act(const SimState& state, int step) override;

 private:
  enum class Phase { Approach, Close, Lift, Finished };
  Phase phase_ = Phase::Approach;
  GoalRegion goal_;
  Scene scene_;
  ObjectModel object_;
  GripperRoute route_;
  double close_opening_ = 0.0;
  std::string fail_reason_;
  bool at_goal_on_reset_ = false;
};

// Factory keyed by the segment labels used in demos.
std::unique_ptr<Policy> make_policy(const std::string& primitive);

}  // namespace extman
