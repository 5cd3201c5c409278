#pragma once

#include <stdexcept>
#include <string>

namespace extman {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structurally sound demo whose keyframes break the contact schedule or
// goal they declare. Distinct from SchemaError so checkers can report it as
// a failed validation rather than unreadable input.
struct DemoViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidScene : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingWall : std::runtime_error {
  MissingWall() : std::runtime_error("scene has no wall") {}
};

struct Unreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooWideError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoClearanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WorkspaceViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Constraint solve or goal construction failed; switch_index is the first
/// failing contact switch (-1 when not tied to one).
struct InfeasibleError : std::runtime_error {
  int switch_index;
  explicit InfeasibleError(const std::string& msg, int index = -1)
      : std::runtime_error(msg), switch_index(index) {}
};

}  // namespace extman
