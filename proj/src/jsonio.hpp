#pragma once

#include <cmath>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "extman/errors.hpp"
#include "extman/geometry.hpp"

namespace extman {
namespace jsonio {

inline void reject_unknown(const nlohmann::json& obj,
                           std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) throw ParseError("unknown key '" + it.key() + "' in " + where);
  }
}

inline Eigen::Vector3d read_vec3(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(where + " must be an array of 3 numbers");
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline nlohmann::json vec3(const Eigen::Vector3d& v) {
  return nlohmann::json{v.x(), v.y(), v.z()};
}

inline Pose read_pose(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be an object");
  reject_unknown(j, {"position", "quaternion"}, where);
  Pose pose;
  pose.p = read_vec3(j.at("position"), where + ".position");
  const nlohmann::json& q = j.at("quaternion");
  if (!q.is_array() || q.size() != 4)
    throw ParseError(where + ".quaternion must be [w, x, y, z]");
  pose.q = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                              q[2].get<double>(), q[3].get<double>());
  if (std::abs(pose.q.squaredNorm() - 1.0) > 1e-6)
    throw ParseError(where + ".quaternion is not unit length");
  return pose;
}

inline nlohmann::json pose(const Pose& p) {
  return nlohmann::json{
      {"position", vec3(p.p)},
      {"quaternion", {p.q.w(), p.q.x(), p.q.y(), p.q.z()}}};
}

}  // namespace jsonio
}  // namespace extman
