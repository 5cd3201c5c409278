#include "extman/retarget.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "extman/errors.hpp"
#include "jsonio.hpp"

namespace extman {

using nlohmann::json;

Demo demo_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("demo parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("demo root must be an object");
  jsonio::reject_unknown(
      j, {"scene", "object", "keyframes", "labels", "switch_indices", "final_goal"},
      "demo");

  Demo demo;
  try {
    demo.scene = scene_from_json_text(j.at("scene").dump());

    const json& obj = j.at("object");
    if (!obj.is_object()) throw ParseError("demo object must be an object");
    jsonio::reject_unknown(obj, {"name", "half_extents"}, "demo object");
    demo.object.name = obj.at("name").get<std::string>();
    demo.object.box.half = jsonio::read_vec3(obj.at("half_extents"), "half_extents");
    if ((demo.object.box.half.array() <= 0.0).any())
      throw ParseError("demo object has non-positive extent");

    const json& frames = j.at("keyframes");
    if (!frames.is_array() || frames.size() < 2)
      throw ParseError("demo needs at least two keyframes");
    for (const json& f : frames) {
      if (!f.is_object()) throw ParseError("keyframe must be an object");
      jsonio::reject_unknown(f, {"t", "position", "quaternion"}, "keyframe");
      demo.times.push_back(f.at("t").get<double>());
      json pose_obj = {{"position", f.at("position")}, {"quaternion", f.at("quaternion")}};
      demo.keyframes.push_back(jsonio::read_pose(pose_obj, "keyframe"));
    }
    for (size_t i = 1; i < demo.times.size(); ++i)
      if (!(demo.times[i] > demo.times[i - 1]))
        throw ParseError("keyframe times must increase");

    for (const json& l : j.at("labels")) {
      const std::string label = l.get<std::string>();
      primitive_env_contact(label);  // rejects unknown primitives
      demo.labels.push_back(label);
    }
    if (demo.labels.empty()) throw ParseError("demo has no segments");

    for (const json& s : j.at("switch_indices"))
      demo.switch_indices.push_back(s.get<int>());
    if (demo.switch_indices.size() != demo.labels.size())
      throw ParseError("one switch index per segment required");
    int prev = 0;
    for (int idx : demo.switch_indices) {
      if (idx <= prev || idx >= static_cast<int>(demo.keyframes.size()))
        throw ParseError("switch indices must increase within the keyframes");
      prev = idx;
    }
    if (demo.switch_indices.back() != static_cast<int>(demo.keyframes.size()) - 1)
      throw ParseError("demo must end at its last switch");

    demo.final_goal = jsonio::read_pose(j.at("final_goal"), "final_goal");
  } catch (const json::exception& e) {
    throw ParseError(std::string("demo field error: ") + e.what());
  }
  return demo;
}

Demo load_demo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open demo file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return demo_from_json_text(ss.str());
}

std::string demo_to_json_text(const Demo& demo) {
  json j;
  j["scene"] = json::parse(scene_to_json_text(demo.scene));
  j["object"] = {{"name", demo.object.name},
                 {"half_extents", jsonio::vec3(demo.object.box.half)}};
  j["keyframes"] = json::array();
  for (size_t i = 0; i < demo.keyframes.size(); ++i) {
    const Pose& x = demo.keyframes[i];
    j["keyframes"].push_back({{"t", demo.times[i]},
                              {"position", jsonio::vec3(x.p)},
                              {"quaternion", {x.q.w(), x.q.x(), x.q.y(), x.q.z()}}});
  }
  j["labels"] = demo.labels;
  j["switch_indices"] = demo.switch_indices;
  j["final_goal"] = jsonio::pose(demo.final_goal);
  return j.dump(2) + "\n";
}

void save_demo(const Demo& demo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write demo file: " + path);
  out << demo_to_json_text(demo);
}

bool GoalRegion::contains(const Pose& x) const {
  return (x.p - center.p).norm() <= pos_radius &&
         angular_distance(x.q, center.q) <= ang_radius;
}

EnvContact primitive_env_contact(const std::string& primitive) {
  if (primitive == "push") return EnvContact::Ground;
  if (primitive == "pull") return EnvContact::Ground;
  if (primitive == "pivot") return EnvContact::GroundWall;
  if (primitive == "grasp") return EnvContact::Ground;
  throw ParseError("unknown primitive '" + primitive + "'");
}

RobotContact primitive_robot_contact(const std::string& primitive) {
  if (primitive == "push") return RobotContact::None;
  if (primitive == "pull") return RobotContact::Top;
  if (primitive == "pivot") return RobotContact::Antipodal;
  if (primitive == "grasp") return RobotContact::Grasp;
  throw ParseError("unknown primitive '" + primitive + "'");
}

EnvContact switch_env_contact(const Demo& demo, int i) {
  const std::string& label = demo.labels.at(static_cast<size_t>(i));
  const EnvContact end =
      label == "grasp" ? EnvContact::Free : primitive_env_contact(label);
  if (i + 1 < demo.segments()) {
    const EnvContact next = primitive_env_contact(demo.labels[static_cast<size_t>(i) + 1]);
    return static_cast<int>(next) > static_cast<int>(end) ? next : end;
  }
  return end;
}

std::vector<Pose> demo_switch_poses(const Demo& demo) {
  std::vector<Pose> out;
  out.push_back(demo.keyframes.front());
  for (int idx : demo.switch_indices)
    out.push_back(demo.keyframes[static_cast<size_t>(idx)]);
  return out;
}

std::vector<Pose> remap_switches(const Demo& demo, const Pose& start) {
  const std::vector<Pose> anchors = demo_switch_poses(demo);
  std::vector<Pose> out;
  out.push_back(start);
  for (size_t i = 0; i + 1 < anchors.size(); ++i) {
    if (bitwise_equal(out.back(), anchors[i])) {
      out.push_back(anchors[i + 1]);
    } else {
      out.push_back(
          compose(relative_transform(anchors[i], anchors[i + 1]), out.back()));
    }
  }
  return out;
}

SolveResult retarget_switch(const Scene& scene, const Cuboid& box,
                            const Pose& target, EnvContact contact,
                            const SolverConfig& cfg) {
  ConstraintSystem sys;
  sys.cost_terms = [&target](const Pose& x) {
    Eigen::VectorXd r(4);
    r.head<3>() = x.p - target.p;
    r[3] = std::sqrt(1e-3) * angular_distance(x.q, target.q);
    return r;
  };
  sys.equalities = [&scene, &box, contact](const Pose& x) {
    return env_equality_residuals(scene, box, x, contact);
  };
  sys.inequalities = [&scene, &box](const Pose& x) {
    return env_inequality_residuals(scene, box, x);
  };
  return solve_pose(sys, target, cfg);
}

std::vector<SwitchGoal> build_goal_sequence(const Demo& demo, const Scene& scene,
                                            const Cuboid& box, const Pose& start,
                                            bool ablate, const SolverConfig& cfg) {
  const std::vector<Pose> anchors = demo_switch_poses(demo);
  std::vector<SwitchGoal> goals;
  Pose prev = start;
  for (int i = 0; i < demo.segments(); ++i) {
    const size_t k = static_cast<size_t>(i);
    const Pose target =
        bitwise_equal(prev, anchors[k])
            ? anchors[k + 1]
            : compose(relative_transform(anchors[k], anchors[k + 1]), prev);
    SwitchGoal goal;
    goal.primitive = demo.labels[k];
    goal.env = switch_env_contact(demo, i);
    goal.next_robot = i + 1 < demo.segments()
                          ? primitive_robot_contact(demo.labels[k + 1])
                          : RobotContact::None;
    if (ablate || goal.env == EnvContact::Free) {
      goal.region.center = target;
      goal.solve_violation = 0.0;
    } else {
      const SolveResult res = retarget_switch(scene, box, target, goal.env, cfg);
      goal.solve_violation = res.max_violation;
      if (!res.feasible)
        throw InfeasibleError("no reachable pose holds contact '" +
                                  to_string(goal.env) + "' at switch " +
                                  std::to_string(i) + " (" + goal.primitive + ")",
                              i);
      goal.region.center = res.pose;
    }
    goals.push_back(goal);
    prev = goal.region.center;
  }
  return goals;
}

}  // namespace extman
