#include "extman/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "extman/errors.hpp"

namespace extman {

using nlohmann::json;

double Wall::yaw() const { return yaw_deg * M_PI / 180.0; }

Plane wall_plane(const Scene& scene) {
  if (!scene.wall) throw MissingWall();
  const double c = std::cos(scene.wall->yaw());
  const double s = std::sin(scene.wall->yaw());
  Plane plane;
  plane.point = Eigen::Vector3d(scene.wall->center_x, 0.0, 0.0);
  plane.normal = Eigen::Vector3d(-c, -s, 0.0);  // toward the origin
  return plane;
}

Eigen::Vector3d wall_lateral(const Scene& scene) {
  const Plane plane = wall_plane(scene);
  return plane.normal.cross(Eigen::Vector3d::UnitZ());
}

bool within_wall_span(const Scene& scene, const Eigen::Vector3d& p) {
  if (!scene.wall) return false;
  const Plane plane = wall_plane(scene);
  const Eigen::Vector3d lateral = wall_lateral(scene);
  return std::abs((p - plane.point).dot(lateral)) <= 0.5 * scene.wall->length;
}

void wall_slab(const Scene& scene, Cuboid& box, Pose& pose) {
  const Plane plane = wall_plane(scene);
  constexpr double kThickness = 0.01;
  box.half = Eigen::Vector3d(kThickness / 2.0, scene.wall->length / 2.0,
                             scene.wall->height / 2.0);
  // Local x points away from the origin (behind the contact plane).
  const Eigen::Vector3d ex = -plane.normal;
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d ey = ez.cross(ex);
  Eigen::Matrix3d rot;
  rot.col(0) = ex;
  rot.col(1) = ey;
  rot.col(2) = ez;
  pose.q = Eigen::Quaterniond(rot);
  pose.p = plane.point - plane.normal * (kThickness / 2.0) +
           Eigen::Vector3d(0.0, 0.0, scene.wall->height / 2.0);
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) throw ParseError("unknown key '" + it.key() + "' in " + where);
  }
}

Eigen::Vector3d read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(where + " must be an array of 3 numbers");
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Eigen::Vector2d read_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(where + " must be an array of 2 numbers");
  return Eigen::Vector2d(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

Scene scene_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scene root must be an object");
  reject_unknown_keys(j, {"wall", "obstacles", "gripper"}, "scene");

  Scene scene;
  try {
    if (j.contains("wall") && !j["wall"].is_null()) {
      const json& w = j["wall"];
      if (!w.is_object()) throw ParseError("wall must be an object or null");
      reject_unknown_keys(w, {"center_x", "yaw_deg", "height", "length"}, "wall");
      Wall wall;
      wall.center_x = w.at("center_x").get<double>();
      if (w.contains("yaw_deg")) wall.yaw_deg = w["yaw_deg"].get<double>();
      if (w.contains("height")) wall.height = w["height"].get<double>();
      if (w.contains("length")) wall.length = w["length"].get<double>();
      scene.wall = wall;
    }
    if (j.contains("obstacles")) {
      if (!j["obstacles"].is_array()) throw ParseError("obstacles must be an array");
      for (const json& o : j["obstacles"]) {
        if (!o.is_object()) throw ParseError("obstacle must be an object");
        reject_unknown_keys(o, {"name", "half_extents", "center_xy"}, "obstacle");
        Obstacle obs;
        obs.name = o.at("name").get<std::string>();
        obs.box.half = read_vec3(o.at("half_extents"), "obstacle half_extents");
        obs.center_xy = read_vec2(o.at("center_xy"), "obstacle center_xy");
        if ((obs.box.half.array() <= 0.0).any())
          throw InvalidScene("obstacle '" + obs.name + "' has non-positive extent");
        scene.obstacles.push_back(obs);
      }
    }
    if (j.contains("gripper")) {
      const json& g = j["gripper"];
      if (!g.is_object()) throw ParseError("gripper must be an object");
      reject_unknown_keys(g,
                          {"finger_length", "finger_thickness", "max_opening",
                           "workspace_min", "workspace_max"},
                          "gripper");
      if (g.contains("finger_length"))
        scene.gripper.finger_length = g["finger_length"].get<double>();
      if (g.contains("finger_thickness"))
        scene.gripper.finger_thickness = g["finger_thickness"].get<double>();
      if (g.contains("max_opening"))
        scene.gripper.max_opening = g["max_opening"].get<double>();
      if (g.contains("workspace_min"))
        scene.gripper.workspace_min = read_vec3(g["workspace_min"], "workspace_min");
      if (g.contains("workspace_max"))
        scene.gripper.workspace_max = read_vec3(g["workspace_max"], "workspace_max");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene field error: ") + e.what());
  }

  check_scene(scene);
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json_text(ss.str());
}

std::string scene_to_json_text(const Scene& scene) {
  json j = json::object();
  if (scene.wall) {
    j["wall"] = {{"center_x", scene.wall->center_x},
                 {"yaw_deg", scene.wall->yaw_deg},
                 {"height", scene.wall->height},
                 {"length", scene.wall->length}};
  } else {
    j["wall"] = nullptr;
  }
  j["obstacles"] = json::array();
  for (const Obstacle& o : scene.obstacles) {
    j["obstacles"].push_back(
        {{"name", o.name},
         {"half_extents", {o.box.half.x(), o.box.half.y(), o.box.half.z()}},
         {"center_xy", {o.center_xy.x(), o.center_xy.y()}}});
  }
  j["gripper"] = {
      {"finger_length", scene.gripper.finger_length},
      {"finger_thickness", scene.gripper.finger_thickness},
      {"max_opening", scene.gripper.max_opening},
      {"workspace_min",
       {scene.gripper.workspace_min.x(), scene.gripper.workspace_min.y(),
        scene.gripper.workspace_min.z()}},
      {"workspace_max",
       {scene.gripper.workspace_max.x(), scene.gripper.workspace_max.y(),
        scene.gripper.workspace_max.z()}}};
  return j.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write scene file: " + path);
  out << scene_to_json_text(scene);
}

void check_scene(const Scene& scene) {
  for (size_t i = 0; i < scene.obstacles.size(); ++i) {
    for (size_t k = i + 1; k < scene.obstacles.size(); ++k) {
      const Obstacle& a = scene.obstacles[i];
      const Obstacle& b = scene.obstacles[k];
      if (boxes_overlap(a.box, a.pose(), b.box, b.pose()))
        throw InvalidScene("obstacles '" + a.name + "' and '" + b.name + "' overlap");
    }
  }
  if (scene.wall) {
    Cuboid slab;
    Pose slab_pose;
    wall_slab(scene, slab, slab_pose);
    for (const Obstacle& o : scene.obstacles) {
      if (boxes_overlap(o.box, o.pose(), slab, slab_pose))
        throw InvalidScene("obstacle '" + o.name + "' intersects the wall");
    }
  }
}

}  // namespace extman
