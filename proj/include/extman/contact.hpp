#pragma once

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "extman/geometry.hpp"
#include "extman/scene.hpp"

namespace extman {

// Environment-side contact of the object, ordered by restrictiveness.
enum class EnvContact { Free = 0, Ground = 1, GroundWall = 2 };

// Robot-side contact of the gripper on the object.
enum class RobotContact { None = 0, Top = 1, Antipodal = 2, Grasp = 3 };

std::string to_string(EnvContact c);
std::string to_string(RobotContact c);
EnvContact env_contact_from_string(const std::string& s);
RobotContact robot_contact_from_string(const std::string& s);

inline constexpr double kGraspSlack = 0.004;         // extra opening before closing
inline constexpr double kGripDepth = 0.02;           // fingertip insertion below top
inline constexpr double kConeHalfAngle = M_PI / 6.0; // press-point cone for pivots
inline constexpr double kUprightTolDeg = 2.0;
inline constexpr double kSupportMargin = 1e-3;
inline constexpr double kStandoffHeight = 0.10;

struct GripperConfig {
  Pose pose = Pose::identity();  // local +z runs palm to fingertips
  double opening = 0.0;
};

// Fingertip positions, split along the gripper's local x axis.
std::array<Eigen::Vector3d, 2> fingertips(const GripperModel& model,
                                          const GripperConfig& cfg);

// Lowest corner height; zero when resting on the ground.
double ground_residual(const Cuboid& box, const Pose& pose);

// Signed wall-plane distances of the two lowest among the four corners
// nearest the wall. Zero-zero when a face edge sits flush.
Eigen::Vector2d wall_residual(const Scene& scene, const Cuboid& box,
                              const Pose& pose);
double wall_min_corner_distance(const Scene& scene, const Cuboid& box,
                                const Pose& pose);

// Local axis of the box pointing most nearly down, and the world xy
// components of that axis (zero when a face is exactly down).
int down_face_axis(const Pose& pose, double* sign = nullptr);
Eigen::Vector2d down_face_tilt(const Pose& pose);

bool no_penetration(const Scene& scene, const Cuboid& box, const Pose& pose,
                    double tol);
bool satisfies_env(const Scene& scene, const Cuboid& box, const Pose& pose,
                   EnvContact contact, double tol);

// Resting stably on the ground under gravity: face down within tolerance,
// no penetration, centroid over the support patch with margin.
bool is_freestanding(const Scene& scene, const Cuboid& box, const Pose& pose,
                     double tol = 1e-4);

// Equality residuals that vanish when the pose holds the given contact.
// Ground: [tilt_x, tilt_y, min_corner_z]. GroundWall appends the two
// wall residuals.
Eigen::VectorXd env_equality_residuals(const Scene& scene, const Cuboid& box,
                                       const Pose& pose, EnvContact contact);

// Margins that must stay >= 0: obstacle separations, wall clearance,
// workspace containment of the object center.
Eigen::VectorXd env_inequality_residuals(const Scene& scene, const Cuboid& box,
                                         const Pose& pose);

// Closed fingers pressing the center of the top face, approach straight down.
GripperConfig top_contact(const Cuboid& box, const Pose& object,
                          const GripperModel& model);

// Hover above the top face by kStandoffHeight, fingers open.
GripperConfig standoff_config(const Cuboid& box, const Pose& object,
                              const GripperModel& model);

// Closed fingers pressing the face opposite the wall. The press point must
// lie on the surface inside a cone of half-angle kConeHalfAngle whose apex
// is the object center and whose axis points away from the wall.
GripperConfig antipodal_config(const Scene& scene, const Cuboid& box,
                               const Pose& object, const GripperModel& model);

// [surface distance of press point, cone-angle excess] for a candidate.
Eigen::Vector2d antipodal_residuals(const Scene& scene, const Cuboid& box,
                                    const Pose& object, const GripperModel& model,
                                    const GripperConfig& cfg);

// Top-down pinch across the smallest horizontal extent. Throws TooWideError
// when the opening cannot span it, NoClearanceError when a finger would have
// to descend into the wall gap.
GripperConfig grasp_config(const Scene& scene, const Cuboid& box,
                           const Pose& object, const GripperModel& model);

// Dispatch on the requested robot contact; may throw like grasp_config and
// WorkspaceViolation when the gripper pose leaves the workspace.
GripperConfig robot_contact_config(RobotContact contact, const Scene& scene,
                                   const Cuboid& box, const Pose& object,
                                   const GripperModel& model);

}  // namespace extman
