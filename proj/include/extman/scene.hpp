#pragma once

#include <optional>
#include <string>
#include <vector>

#include "extman/geometry.hpp"

namespace extman {

/// Vertical barrier fixed to the ground, yawed about its own center.
/// yaw_deg is the stored canonical field so files round-trip bit-exact.
struct Wall {
  double center_x = 0.75;
  double yaw_deg = 0.0;
  double height = 0.10;
  double length = 1.015;

  double yaw() const;  // radians
};

/// Static box resting on the ground with identity orientation.
struct Obstacle {
  std::string name;
  Cuboid box;
  Eigen::Vector2d center_xy{0.0, 0.0};

  Pose pose() const {
    return Pose::translation(center_xy.x(), center_xy.y(), box.half.z());
  }
};

/// The manipulated cuboid.
struct ObjectModel {
  std::string name = "object";
  Cuboid box;
};

/// Free-flying parallel-jaw gripper abstraction.
struct GripperModel {
  double finger_length = 0.05;
  double finger_thickness = 0.01;
  double max_opening = 0.08;
  Eigen::Vector3d workspace_min{0.2, -0.5, 0.0};
  Eigen::Vector3d workspace_max{1.0, 0.5, 0.6};

  bool in_workspace(const Eigen::Vector3d& p) const {
    return (p.array() >= workspace_min.array()).all() &&
           (p.array() <= workspace_max.array()).all();
  }
};

struct Scene {
  std::optional<Wall> wall;
  std::vector<Obstacle> obstacles;
  GripperModel gripper;

  static Plane ground() {
    return Plane{Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ()};
  }
};

/// Plane through the wall face nearest the origin; normal points back toward
/// the origin. Throws MissingWall when the scene has no wall.
Plane wall_plane(const Scene& scene);

/// Horizontal unit vector along the wall, normal x up.
Eigen::Vector3d wall_lateral(const Scene& scene);

/// True when the projection of p onto the wall axis lies within its length.
bool within_wall_span(const Scene& scene, const Eigen::Vector3d& p);

/// Thin slab used for clearance checks around the wall (1 cm thick, extending
/// away from the origin behind the contact plane).
void wall_slab(const Scene& scene, Cuboid& box, Pose& pose);

/// Parses a scene file. Throws ParseError on malformed input or unknown keys,
/// InvalidScene when loaded bodies violate scene invariants.
Scene load_scene(const std::string& path);
Scene scene_from_json_text(const std::string& text);

void save_scene(const Scene& scene, const std::string& path);
std::string scene_to_json_text(const Scene& scene);

/// Throws InvalidScene on overlapping obstacles or obstacle/wall intersection.
void check_scene(const Scene& scene);

}  // namespace extman
