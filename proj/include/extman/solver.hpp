#pragma once

#include <functional>

#include <Eigen/Dense>

#include "extman/contact.hpp"
#include "extman/geometry.hpp"

namespace extman {

// Nonlinear projection problem over an SE(3) chart around a guess pose.
// cost_terms are squared and summed into the objective, equalities are
// driven to zero, inequalities are kept >= 0.
struct ConstraintSystem {
  std::function<Eigen::VectorXd(const Pose&)> cost_terms;
  std::function<Eigen::VectorXd(const Pose&)> equalities;
  std::function<Eigen::VectorXd(const Pose&)> inequalities;
};

struct SolverConfig {
  double tol = 1e-6;        // constraint target during penalty phases
  double accept = 1e-4;     // violation above this marks the result infeasible
  int max_outer = 8;        // penalty escalations
  int max_inner = 60;       // descent iterations per escalation
  int multistarts = 8;      // fixed perturbation fan, first start is the guess
  double mu0 = 1e2;
  double mu_growth = 10.0;
  double fd_step = 1e-7;
};

struct SolveResult {
  Pose pose = Pose::identity();
  double objective = 0.0;
  double max_violation = 0.0;
  bool feasible = false;
};

// Penalty descent with a feasibility polish, deterministic across runs.
// Returns the guess bitwise untouched when it already solves the problem.
SolveResult solve_pose(const ConstraintSystem& sys, const Pose& guess,
                       const SolverConfig& cfg = {});

// Pure feasibility over a gripper configuration (pose plus opening), no
// objective. Used when a contact family has no closed-form config.
struct GripperSystem {
  std::function<Eigen::VectorXd(const GripperConfig&)> equalities;
  std::function<Eigen::VectorXd(const GripperConfig&)> inequalities;
};

struct FeasibleResult {
  GripperConfig config;
  double max_violation = 0.0;
  bool feasible = false;
};

// Same machinery as solve_pose on a 7-parameter chart around the seed.
// An empty system returns the seed bitwise unchanged.
FeasibleResult solve_feasible(const GripperSystem& sys,
                              const GripperConfig& seed,
                              const SolverConfig& cfg = {});

}  // namespace extman
