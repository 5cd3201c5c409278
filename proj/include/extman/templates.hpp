#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "extman/pipeline.hpp"

namespace extman {

struct ObjectSet {
  std::string name;
  Eigen::Vector3d half;
};

// Seven boxes spanning the size range the primitives handle.
const std::vector<ObjectSet>& standard_objects();
// Too low to pinch at the wall after tipping up; takes the pull-out branch.
ObjectSet short_object();

// Canonical recorded episodes, one per task family:
//   grasping:       push, pivot, grasp
//   grasping_short: push, pivot, pull, grasp
//   avoidance:      push, push around a center block
//   storage:        push, pivot, pull back beside a crate
//   retrieval:      pull out of a corridor, push, pivot, grasp
Demo make_demo(const std::string& task);

// Four recordings of the grasping episode with different box footprints and
// lateral offsets but the same switch-to-switch motion.
std::vector<Demo> grasping_demo_family();

// Scene and start sampled from the family envelope, deterministic in
// (task, object, seed). Short objects swap in the pull-out recording.
EvalCase make_trial(const std::string& task, const ObjectSet& object,
                    uint64_t seed, bool ablated);

// All four families over the seven objects, retargeted.
std::vector<EvalCase> standard_batch(int seeds_per_cell = 5);

// Grasping scenes whose wall sits at least 5 cm or 5 degrees away from the
// recorded one, paired retargeted and ablated on identical draws.
std::vector<EvalCase> ablation_batch(int seeds_per_cell = 5);

}  // namespace extman
