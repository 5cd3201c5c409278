#include "extman/templates.hpp"

#include <cmath>
#include <random>

#include "extman/errors.hpp"

namespace extman {

namespace {

Pose flat(double x, double y, double z, double yaw = 0.0) {
  Pose pose = Pose::rot_z(yaw);
  pose.p = Eigen::Vector3d(x, y, z);
  return pose;
}

// Resting on the former +x face after tipping up against a +x wall.
Pose tipped(double x, double y, double z) {
  Pose pose = Pose::rot_y(M_PI / 2.0);
  pose.p = Eigen::Vector3d(x, y, z);
  return pose;
}

Demo chain_demo(Scene scene, ObjectModel object, std::vector<std::string> labels,
                std::vector<Pose> states) {
  Demo demo;
  demo.scene = std::move(scene);
  demo.object = std::move(object);
  demo.keyframes = std::move(states);
  demo.labels = std::move(labels);
  demo.times.resize(demo.keyframes.size());
  for (size_t i = 0; i < demo.keyframes.size(); ++i)
    demo.times[i] = static_cast<double>(i);
  for (size_t i = 1; i < demo.keyframes.size(); ++i)
    demo.switch_indices.push_back(static_cast<int>(i));
  demo.final_goal = demo.keyframes.back();
  return demo;
}

Scene walled_scene(double center_x) {
  Scene scene;
  scene.wall = Wall{};
  scene.wall->center_x = center_x;
  return scene;
}

Obstacle block(const std::string& name, const Eigen::Vector3d& half, double x,
               double y) {
  Obstacle obs;
  obs.name = name;
  obs.box.half = half;
  obs.center_xy = Eigen::Vector2d(x, y);
  return obs;
}

ObjectModel cracker() {
  ObjectModel obj;
  obj.name = "cracker";
  obj.box.half = Eigen::Vector3d(0.100, 0.075, 0.030);
  return obj;
}

Demo grasping_demo(const std::string& name, const Eigen::Vector3d& half, double y) {
  Scene scene = walled_scene(0.75);
  ObjectModel obj;
  obj.name = name;
  obj.box.half = half;
  const double hx = half.x();
  const double hz = half.z();
  const double flush_x = 0.75 - hx;
  return chain_demo(scene, obj, {"push", "pivot", "grasp"},
                    {flat(flush_x - 0.25, y, hz), flat(flush_x, y, hz),
                     tipped(0.75 - hz, y, hx), tipped(0.75 - hz, y, hx + 0.10)});
}

Demo grasping_short_demo() {
  Scene scene = walled_scene(0.75);
  ObjectModel obj;
  obj.name = "mini";
  obj.box.half = Eigen::Vector3d(0.050, 0.0675, 0.0225);
  // Tipped up the box is only 0.10 high, so fingers cannot reach past the
  // wall; pull it back for finger room before pinching.
  return chain_demo(scene, obj, {"push", "pivot", "pull", "grasp"},
                    {flat(0.45, 0.0, 0.0225), flat(0.70, 0.0, 0.0225),
                     tipped(0.7275, 0.0, 0.05), tipped(0.6875, 0.0, 0.05),
                     tipped(0.6875, 0.0, 0.15)});
}

Demo avoidance_demo() {
  Scene scene = walled_scene(0.82);
  scene.obstacles.push_back(
      block("center_block", Eigen::Vector3d(0.129, 0.154, 0.0385), 0.40, 0.0));
  return chain_demo(scene, cracker(), {"push", "push"},
                    {flat(0.36, -0.30, 0.03), flat(0.67, -0.30, 0.03),
                     flat(0.67, 0.10, 0.03)});
}

Demo storage_demo() {
  Scene scene = walled_scene(0.76);
  scene.obstacles.push_back(
      block("crate", Eigen::Vector3d(0.0925, 0.1175, 0.070), 0.312, 0.108));
  return chain_demo(scene, cracker(), {"push", "pivot", "pull"},
                    {flat(0.42, -0.12, 0.03), flat(0.66, -0.12, 0.03),
                     tipped(0.73, -0.12, 0.10), tipped(0.48, -0.12, 0.10)});
}

Demo retrieval_demo() {
  Scene scene = walled_scene(0.81);
  scene.obstacles.push_back(
      block("bin_right", Eigen::Vector3d(0.0925, 0.1175, 0.070), 0.54, -0.19));
  scene.obstacles.push_back(
      block("bin_left", Eigen::Vector3d(0.105, 0.1275, 0.0815), 0.353, 0.238));
  return chain_demo(scene, cracker(), {"pull", "push", "pivot", "grasp"},
                    {flat(0.53, 0.019, 0.03), flat(0.31, 0.019, 0.03),
                     flat(0.71, 0.019, 0.03), tipped(0.78, 0.019, 0.10),
                     tipped(0.78, 0.019, 0.20)});
}

struct Envelope {
  double wall_lo, wall_hi;
  double wyaw_lo, wyaw_hi;  // degrees
  double x_lo, x_hi;
  double y_lo, y_hi;
  double psi_lo, psi_hi;  // start yaw, degrees
};

Envelope envelope(const std::string& task) {
  if (task == "grasping") return {0.70, 0.85, -10, 10, 0.35, 0.45, -0.10, 0.10, -10, 10};
  if (task == "avoidance") return {0.80, 0.85, -10, 4, 0.34, 0.38, -0.33, -0.27, -6, 6};
  if (task == "storage") return {0.72, 0.80, -8, 8, 0.38, 0.46, -0.17, -0.11, -6, 6};
  if (task == "retrieval") return {0.78, 0.85, -4, 4, 0.50, 0.55, 0.016, 0.022, -3, 3};
  throw ParseError("unknown task family '" + task + "'");
}

uint64_t mix_seed(const std::string& a, const std::string& b, uint64_t seed) {
  uint64_t h = 1469598103934665603ull;
  auto eat = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  eat(a);
  eat(b);
  h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

double uni(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

const std::vector<ObjectSet>& standard_objects() {
  static const std::vector<ObjectSet> sets = {
      {"cracker", Eigen::Vector3d(0.100, 0.075, 0.030)},
      {"cereal", Eigen::Vector3d(0.095, 0.080, 0.035)},
      {"cocoa", Eigen::Vector3d(0.080, 0.060, 0.025)},
      {"flapjack", Eigen::Vector3d(0.090, 0.070, 0.020)},
      {"oat", Eigen::Vector3d(0.105, 0.065, 0.032)},
      {"seasoning", Eigen::Vector3d(0.070, 0.055, 0.028)},
      {"wafer", Eigen::Vector3d(0.085, 0.072, 0.022)},
  };
  return sets;
}

ObjectSet short_object() { return {"mini", Eigen::Vector3d(0.050, 0.0675, 0.0225)}; }

Demo make_demo(const std::string& task) {
  if (task == "grasping") return grasping_demo("cracker", cracker().box.half, 0.0);
  if (task == "grasping_short") return grasping_short_demo();
  if (task == "avoidance") return avoidance_demo();
  if (task == "storage") return storage_demo();
  if (task == "retrieval") return retrieval_demo();
  throw ParseError("unknown task family '" + task + "'");
}

std::vector<Demo> grasping_demo_family() {
  return {grasping_demo("cracker", Eigen::Vector3d(0.100, 0.075, 0.030), 0.0),
          grasping_demo("tall_thin", Eigen::Vector3d(0.085, 0.060, 0.030), 0.05),
          grasping_demo("broad", Eigen::Vector3d(0.115, 0.090, 0.030), -0.04),
          grasping_demo("square", Eigen::Vector3d(0.095, 0.0825, 0.030), 0.02)};
}

EvalCase make_trial(const std::string& task, const ObjectSet& object,
                    uint64_t seed, bool ablated) {
  const Envelope env = envelope(task);
  std::mt19937_64 rng(mix_seed(task, object.name, seed));
  const double wall_x = uni(rng, env.wall_lo, env.wall_hi);
  const double wall_yaw = uni(rng, env.wyaw_lo, env.wyaw_hi);
  const double x0 = uni(rng, env.x_lo, env.x_hi);
  const double y0 = uni(rng, env.y_lo, env.y_hi);
  const double psi = uni(rng, env.psi_lo, env.psi_hi) * M_PI / 180.0;

  EvalCase c;
  c.task = task;
  c.variant = ablated ? "ablated" : "retargeted";
  c.object = object.name;
  c.seed = seed;

  Demo demo = make_demo(task);
  c.spec.scene = demo.scene;
  c.spec.scene.wall->center_x = wall_x;
  c.spec.scene.wall->yaw_deg = wall_yaw;
  if (task == "grasping" &&
      2.0 * object.half.x() - kGripDepth < c.spec.scene.wall->height)
    demo = make_demo("grasping_short");
  c.spec.demo = std::move(demo);
  c.spec.object.name = object.name;
  c.spec.object.box.half = object.half;
  c.spec.start = flat(x0, y0, object.half.z(), psi);
  c.spec.ablate_retarget = ablated;
  return c;
}

std::vector<EvalCase> standard_batch(int seeds_per_cell) {
  std::vector<EvalCase> out;
  for (const char* task : {"avoidance", "storage", "grasping", "retrieval"})
    for (const ObjectSet& obj : standard_objects())
      for (int s = 1; s <= seeds_per_cell; ++s)
        out.push_back(make_trial(task, obj, static_cast<uint64_t>(s), false));
  return out;
}

std::vector<EvalCase> ablation_batch(int seeds_per_cell) {
  std::vector<EvalCase> out;
  for (const ObjectSet& obj : standard_objects()) {
    for (int s = 1; s <= seeds_per_cell; ++s) {
      std::mt19937_64 rng(mix_seed("grasping.shifted", obj.name,
                                   static_cast<uint64_t>(s)));
      const int mode = static_cast<int>(rng() % 3);
      const double shift = (rng() % 2 ? 1.0 : -1.0) * uni(rng, 0.05, 0.07);
      const double yaw = (rng() % 2 ? 1.0 : -1.0) * uni(rng, 5.0, 9.0);
      double wall_x = 0.75;
      double wall_yaw = 0.0;
      if (mode != 1) wall_x += shift;
      if (mode != 0) wall_yaw = yaw;
      const double x0 = uni(rng, 0.35, 0.45);
      const double y0 = uni(rng, -0.10, 0.10);
      const double psi = uni(rng, -5.0, 5.0) * M_PI / 180.0;

      EvalCase base;
      base.task = "grasping";
      base.variant = "retargeted";
      base.object = obj.name;
      base.seed = static_cast<uint64_t>(s);
      base.spec.demo = make_demo("grasping");
      base.spec.scene = base.spec.demo.scene;
      base.spec.scene.wall->center_x = wall_x;
      base.spec.scene.wall->yaw_deg = wall_yaw;
      base.spec.object.name = obj.name;
      base.spec.object.box.half = obj.half;
      base.spec.start = flat(x0, y0, obj.half.z(), psi);
      out.push_back(base);

      EvalCase abl = base;
      abl.variant = "ablated";
      abl.spec.ablate_retarget = true;
      out.push_back(abl);
    }
  }
  return out;
}

}  // namespace extman
