#include "extman/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "extman/errors.hpp"
#include "jsonio.hpp"

namespace extman {

using nlohmann::json;

namespace {

constexpr double kPreTol = 1e-3;       // contact check before each segment
constexpr double kDemoContactTol = 5e-3;

std::string contact_residual_note(const Scene& scene, const Cuboid& box,
                                  const Pose& pose, EnvContact env) {
  const Eigen::VectorXd r = env_equality_residuals(scene, box, pose, env);
  double worst = 0.0;
  for (int i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i]));
  char buf[48];
  std::snprintf(buf, sizeof(buf), " (residual %.4f)", worst);
  return buf;
}

ObjectModel object_from_json(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object");
  jsonio::reject_unknown(obj, {"name", "half_extents"}, where);
  ObjectModel model;
  model.name = obj.at("name").get<std::string>();
  model.box.half = jsonio::read_vec3(obj.at("half_extents"), where + ".half_extents");
  if ((model.box.half.array() <= 0.0).any())
    throw ParseError(where + " has non-positive extent");
  return model;
}

json object_to_json(const ObjectModel& model) {
  return {{"name", model.name}, {"half_extents", jsonio::vec3(model.box.half)}};
}

json goal_to_json(const SwitchGoal& g) {
  return {{"primitive", g.primitive},
          {"env", to_string(g.env)},
          {"center", jsonio::pose(g.region.center)},
          {"pos_radius", g.region.pos_radius},
          {"ang_radius", g.region.ang_radius}};
}

SwitchGoal goal_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be an object");
  jsonio::reject_unknown(j, {"primitive", "env", "center", "pos_radius", "ang_radius"},
                         where);
  SwitchGoal g;
  g.primitive = j.at("primitive").get<std::string>();
  g.env = env_contact_from_string(j.at("env").get<std::string>());
  g.region.center = jsonio::read_pose(j.at("center"), where + ".center");
  g.region.pos_radius = j.at("pos_radius").get<double>();
  g.region.ang_radius = j.at("ang_radius").get<double>();
  return g;
}

// Why the pose misses the contact, for failure classification. Empty when it
// holds.
std::optional<std::string> env_violation(const Scene& scene, const Cuboid& box,
                                         const Pose& pose, EnvContact contact,
                                         double tol) {
  if (contact == EnvContact::GroundWall && !scene.wall) return std::string("wall");
  if (satisfies_env(scene, box, pose, contact, tol)) return std::nullopt;
  if (!no_penetration(scene, box, pose, tol)) return std::string("penetration");
  if (contact == EnvContact::Free) return std::string("penetration");
  const Eigen::VectorXd r = env_equality_residuals(scene, box, pose, contact);
  int worst = 0;
  r.cwiseAbs().maxCoeff(&worst);
  if (worst <= 1) return std::string("tilt");
  if (worst == 2) return std::string("ground");
  return std::string("wall");
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

TaskSpec load_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open task file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ParseError(std::string("task parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("task root must be an object");
  jsonio::reject_unknown(
      j, {"demo", "scene", "object", "start", "ablate_retarget", "max_steps"},
      "task");

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&base](const std::string& rel) {
    std::filesystem::path p(rel);
    return p.is_absolute() ? p.string() : (base / p).string();
  };

  TaskSpec task;
  try {
    const json& d = j.at("demo");
    task.demo = d.is_string() ? load_demo(resolve(d.get<std::string>()))
                              : demo_from_json_text(d.dump());

    if (j.contains("scene")) {
      const json& s = j.at("scene");
      task.scene = s.is_string() ? load_scene(resolve(s.get<std::string>()))
                                 : scene_from_json_text(s.dump());
    } else {
      task.scene = task.demo.scene;
    }

    task.object = j.contains("object") ? object_from_json(j.at("object"), "task.object")
                                       : task.demo.object;
    task.start = j.contains("start") ? jsonio::read_pose(j.at("start"), "task.start")
                                     : task.demo.keyframes.front();
    if (j.contains("ablate_retarget"))
      task.ablate_retarget = j.at("ablate_retarget").get<bool>();
    if (j.contains("max_steps")) {
      task.max_steps_per_segment = j.at("max_steps").get<int>();
      if (task.max_steps_per_segment <= 0)
        throw ParseError("task.max_steps must be positive");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("task field error: ") + e.what());
  }
  return task;
}

void validate_demo(const Demo& demo) {
  if (demo.keyframes.size() < 2) throw SchemaError("demo needs at least two keyframes");
  if (demo.labels.empty()) throw SchemaError("demo has no segments");
  if (demo.switch_indices.size() != demo.labels.size())
    throw SchemaError("one switch index per segment required");

  const Cuboid& box = demo.object.box;
  const Pose& start = demo.keyframes.front();
  const EnvContact start_env = primitive_env_contact(demo.labels.front());
  if (!satisfies_env(demo.scene, box, start, start_env, kDemoContactTol))
    throw DemoViolation("demo start does not hold the contact '" +
                        to_string(start_env) + "' its first segment needs" +
                        contact_residual_note(demo.scene, box, start, start_env));
  if (!is_freestanding(demo.scene, box, start, kDemoContactTol))
    throw DemoViolation("demo start pose is not freestanding");

  for (int i = 0; i < demo.segments(); ++i) {
    const Pose& x = demo.keyframes[static_cast<size_t>(demo.switch_indices[i])];
    const EnvContact env = switch_env_contact(demo, i);
    if (!satisfies_env(demo.scene, box, x, env, kDemoContactTol))
      throw DemoViolation("demo switch " + std::to_string(i) +
                          " does not hold the contact '" + to_string(env) +
                          "'" + contact_residual_note(demo.scene, box, x, env));
  }

  GoalRegion goal;
  goal.center = demo.final_goal;
  if (!goal.contains(demo.keyframes.back()))
    throw DemoViolation("demo does not end inside its goal region");
}

RunReport run_task(const TaskSpec& task) {
  RunReport report;
  validate_demo(task.demo);
  check_scene(task.scene);

  const Cuboid& box = task.object.box;
  if (!is_freestanding(task.scene, box, task.start, kPreTol)) {
    report.failure_reason = "infeasible: start pose is not freestanding";
    return report;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SwitchGoal> goals;
  try {
    goals = build_goal_sequence(task.demo, task.scene, box, task.start,
                                task.ablate_retarget, task.solver);
  } catch (const InfeasibleError& e) {
    report.solve_ms = elapsed_ms(t0);
    report.failure_reason = std::string("infeasible: ") + e.what();
    return report;
  }
  report.solve_ms = elapsed_ms(t0);
  report.goals = goals;

  SimState state = initial_state(task.scene, task.start);
  for (size_t i = 0; i < goals.size(); ++i) {
    const SwitchGoal& g = goals[i];
    SegmentReport sr;
    sr.primitive = g.primitive;

    // The segment's motion keeps its own contact from start to goal; verify
    // both ends before moving so a goal off the manifold is reported without
    // running the motion.
    const EnvContact motion_env = primitive_env_contact(g.primitive);
    std::optional<std::string> why =
        env_violation(task.scene, box, state.object, motion_env, kPreTol);
    if (!why) why = env_violation(task.scene, box, g.region.center, g.env, kPreTol);
    if (why) {
      sr.failure = "precondition: " + *why;
      report.failure_reason = *sr.failure;
      report.segments.push_back(sr);
      return report;
    }

    auto policy = make_policy(g.primitive);
    const RolloutResult rr =
        rollout(*policy, state, report.trajectory, g.region, task.scene,
                task.object, task.max_steps_per_segment, static_cast<int>(i));
    sr.steps = rr.steps;
    sr.reached = rr.reached;
    sr.failure = rr.failure;
    sr.goal_pos_err = (state.object.p - g.region.center.p).norm();
    sr.goal_ang_err = angular_distance(state.object.q, g.region.center.q);
    report.total_steps += rr.steps;
    report.segments.push_back(sr);
    if (!rr.reached) {
      report.failure_reason = rr.failure.value_or("goal_missed");
      return report;
    }
  }
  report.success = true;
  return report;
}

std::string report_to_json_text(const RunReport& report) {
  json j;
  j["success"] = report.success;
  j["failure_reason"] = report.failure_reason;
  j["solve_ms"] = report.solve_ms;
  j["total_steps"] = report.total_steps;
  j["segments"] = json::array();
  for (const SegmentReport& s : report.segments) {
    json e = {{"primitive", s.primitive},
              {"reached", s.reached},
              {"steps", s.steps},
              {"goal_pos_err", s.goal_pos_err},
              {"goal_ang_err", s.goal_ang_err}};
    if (s.failure) e["failure"] = *s.failure;
    j["segments"].push_back(e);
  }
  j["goals"] = json::array();
  for (const SwitchGoal& g : report.goals) j["goals"].push_back(goal_to_json(g));
  return j.dump(2) + "\n";
}

void save_trajectory(const RunReport& report, const TaskSpec& task,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write trajectory file: " + path);
  json header;
  header["scene"] = json::parse(scene_to_json_text(task.scene));
  header["object"] = object_to_json(task.object);
  header["goals"] = json::array();
  for (const SwitchGoal& g : report.goals) header["goals"].push_back(goal_to_json(g));
  out << header.dump() << "\n";
  for (const TrajectoryPoint& pt : report.trajectory.points) {
    json line = {{"seg", pt.segment},
                 {"object", jsonio::pose(pt.state.object)},
                 {"gripper", jsonio::pose(pt.state.gripper.pose)},
                 {"opening", pt.state.gripper.opening},
                 {"attached", pt.state.attached}};
    out << line.dump() << "\n";
  }
}

LoadedTrajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trajectory file is empty");

  LoadedTrajectory out;
  try {
    json header = json::parse(line);
    jsonio::reject_unknown(header, {"scene", "object", "goals"}, "trajectory header");
    out.scene = scene_from_json_text(header.at("scene").dump());
    out.object = object_from_json(header.at("object"), "trajectory object");
    for (const json& g : header.at("goals"))
      out.goals.push_back(goal_from_json(g, "trajectory goal"));

    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json j = json::parse(line);
      const std::string where = "trajectory line " + std::to_string(lineno);
      jsonio::reject_unknown(j, {"seg", "object", "gripper", "opening", "attached"},
                             where);
      TrajectoryPoint pt;
      pt.segment = j.at("seg").get<int>();
      pt.state.object = jsonio::read_pose(j.at("object"), where + ".object");
      pt.state.gripper.pose = jsonio::read_pose(j.at("gripper"), where + ".gripper");
      pt.state.gripper.opening = j.at("opening").get<double>();
      pt.state.attached = j.at("attached").get<bool>();
      out.traj.points.push_back(pt);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("trajectory parse failure: ") + e.what());
  }
  return out;
}

AuditResult audit_trajectory(const LoadedTrajectory& loaded) {
  AuditResult audit;
  const int nseg = static_cast<int>(loaded.goals.size());
  audit.segment_reached.assign(static_cast<size_t>(nseg), false);
  if (loaded.traj.points.empty()) {
    audit.detail = "no states";
    return audit;
  }

  for (int i = 0; i < nseg; ++i) {
    const TrajectoryPoint* last = nullptr;
    for (const TrajectoryPoint& pt : loaded.traj.points)
      if (pt.segment == i) last = &pt;
    if (!last) {
      if (audit.detail.empty())
        audit.detail = "segment " + std::to_string(i) + " has no states";
      continue;
    }
    const SwitchGoal& g = loaded.goals[static_cast<size_t>(i)];
    const bool inside = g.region.contains(last->state.object);
    const bool holds = satisfies_env(loaded.scene, loaded.object.box,
                                     last->state.object, g.env, kDemoContactTol);
    audit.segment_reached[static_cast<size_t>(i)] = inside && holds;
    if (!(inside && holds) && audit.detail.empty())
      audit.detail = "segment " + std::to_string(i) +
                     (inside ? " breaks contact" : " misses its goal");
  }
  audit.success = nseg > 0 &&
                  std::all_of(audit.segment_reached.begin(),
                              audit.segment_reached.end(), [](bool b) { return b; });
  return audit;
}

std::vector<EvalRow> evaluate(const std::vector<EvalCase>& cases, int threads) {
  std::vector<EvalRow> rows(cases.size());
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  threads = std::min<int>(threads, std::max<int>(1, static_cast<int>(cases.size())));

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    size_t i;
    while ((i = next.fetch_add(1)) < cases.size()) {
      const EvalCase& c = cases[i];
      EvalRow row;
      row.task = c.task;
      row.variant = c.variant;
      row.object = c.object;
      row.seed = c.seed;
      try {
        const RunReport rep = run_task(c.spec);
        row.success = rep.success;
        row.failure_reason = rep.failure_reason;
        row.solve_ms = rep.solve_ms;
        row.steps = rep.total_steps;
      } catch (const std::exception& e) {
        row.failure_reason = std::string("error: ") + e.what();
      }
      rows[i] = std::move(row);
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

std::string rows_to_csv(const std::vector<EvalRow>& rows) {
  std::ostringstream out;
  out << "task,variant,object,seed,success,failure_reason,solve_ms,steps\n";
  for (const EvalRow& r : rows) {
    char ms[32];
    std::snprintf(ms, sizeof(ms), "%.3f", r.solve_ms);
    out << csv_field(r.task) << ',' << csv_field(r.variant) << ','
        << csv_field(r.object) << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
        << csv_field(r.failure_reason) << ',' << ms << ',' << r.steps << "\n";
  }
  return out.str();
}

}  // namespace extman
