#pragma once

#include <optional>
#include <string>
#include <vector>

#include "extman/primitives.hpp"
#include "extman/retarget.hpp"
#include "extman/scene.hpp"
#include "extman/sim.hpp"
#include "extman/solver.hpp"

namespace extman {

struct TaskSpec {
  Scene scene;
  ObjectModel object;
  Pose start = Pose::identity();
  Demo demo;
  bool ablate_retarget = false;
  int max_steps_per_segment = 2000;
  SolverConfig solver;
};

TaskSpec load_task(const std::string& path);

// Structural and contact sanity of a demo in its own scene. Switch states
// must hold their contacts within 5 mm and the demo must end inside its
// goal. Throws SchemaError for malformed structure and DemoViolation when a
// well-formed demo breaks its declared contacts.
void validate_demo(const Demo& demo);

struct SegmentReport {
  std::string primitive;
  bool reached = false;
  std::optional<std::string> failure;
  int steps = 0;
  double goal_pos_err = 0.0;
  double goal_ang_err = 0.0;
};

struct RunReport {
  bool success = false;
  std::string failure_reason;  // empty on success
  std::vector<SegmentReport> segments;
  std::vector<SwitchGoal> goals;
  Trajectory trajectory;
  double solve_ms = 0.0;
  int total_steps = 0;
};

// Retarget the demo onto the task scene and execute the primitive chain.
// Before each segment both the current state and the goal center must hold
// the contact the boundary demands; a miss is reported as a precondition
// failure without running the motion.
RunReport run_task(const TaskSpec& task);

std::string report_to_json_text(const RunReport& report);

void save_trajectory(const RunReport& report, const TaskSpec& task,
                     const std::string& path);

struct LoadedTrajectory {
  Scene scene;
  ObjectModel object;
  std::vector<SwitchGoal> goals;
  Trajectory traj;
};

LoadedTrajectory load_trajectory(const std::string& path);

struct AuditResult {
  bool success = false;
  std::vector<bool> segment_reached;
  std::string detail;
};

// Re-derive success purely from a saved trajectory file.
AuditResult audit_trajectory(const LoadedTrajectory& loaded);

struct EvalCase {
  std::string task;
  std::string variant;  // retargeted | ablated
  std::string object;
  uint64_t seed = 0;
  TaskSpec spec;
};

struct EvalRow {
  std::string task;
  std::string variant;
  std::string object;
  uint64_t seed = 0;
  bool success = false;
  std::string failure_reason;
  double solve_ms = 0.0;
  int steps = 0;
};

// Run all cases, optionally across threads. Row order and content do not
// depend on the thread count.
std::vector<EvalRow> evaluate(const std::vector<EvalCase>& cases, int threads);

std::string rows_to_csv(const std::vector<EvalRow>& rows);

}  // namespace extman
