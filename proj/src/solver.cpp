#include "extman/solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace extman {

namespace {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector7d = Eigen::Matrix<double, 7, 1>;

Pose chart(const Pose& base, const Vector6d& d) {
  if ((d.array() == 0.0).all()) return base;
  Pose out;
  out.p = base.p + d.head<3>();
  out.q = normalized_lazy(exp_map(d.tail<3>()) * base.q);
  return out;
}

GripperConfig gchart(const GripperConfig& base, const Vector7d& d) {
  if ((d.array() == 0.0).all()) return base;
  GripperConfig out;
  out.pose = chart(base.pose, d.head<6>());
  out.opening = base.opening + d[6];
  return out;
}

Eigen::VectorXd hinge(const Eigen::VectorXd& g) {
  Eigen::VectorXd h(g.size());
  for (int i = 0; i < g.size(); ++i) h[i] = std::max(0.0, -g[i]);
  return h;
}

struct Evaluator {
  const ConstraintSystem& sys;
  const Pose& base;
  double mu;

  Eigen::VectorXd residual(const Vector6d& d) const {
    const Pose x = chart(base, d);
    const Eigen::VectorXd cost = sys.cost_terms ? sys.cost_terms(x) : Eigen::VectorXd();
    const Eigen::VectorXd eq = sys.equalities ? sys.equalities(x) : Eigen::VectorXd();
    const Eigen::VectorXd in =
        sys.inequalities ? hinge(sys.inequalities(x)) : Eigen::VectorXd();
    const double s = std::sqrt(mu);
    Eigen::VectorXd r(cost.size() + eq.size() + in.size());
    r << cost, s * eq, s * in;
    return r;
  }

  Eigen::VectorXd constraint_residual(const Vector6d& d) const {
    const Pose x = chart(base, d);
    const Eigen::VectorXd eq = sys.equalities ? sys.equalities(x) : Eigen::VectorXd();
    const Eigen::VectorXd in =
        sys.inequalities ? hinge(sys.inequalities(x)) : Eigen::VectorXd();
    Eigen::VectorXd r(eq.size() + in.size());
    r << eq, in;
    return r;
  }
};

struct GripperEvaluator {
  const GripperSystem& sys;
  const GripperConfig& base;
  double mu;

  Eigen::VectorXd residual(const Vector7d& d) const {
    return std::sqrt(mu) * constraint_residual(d);
  }

  Eigen::VectorXd constraint_residual(const Vector7d& d) const {
    const GripperConfig x = gchart(base, d);
    const Eigen::VectorXd eq = sys.equalities ? sys.equalities(x) : Eigen::VectorXd();
    const Eigen::VectorXd in =
        sys.inequalities ? hinge(sys.inequalities(x)) : Eigen::VectorXd();
    Eigen::VectorXd r(eq.size() + in.size());
    r << eq, in;
    return r;
  }
};

template <typename F, typename Vec>
Eigen::MatrixXd numeric_jacobian(const F& f, const Vec& d, int rows, double h) {
  constexpr int n = Vec::RowsAtCompileTime;
  Eigen::MatrixXd jac(rows, n);
  for (int i = 0; i < n; ++i) {
    Vec dp = d;
    Vec dm = d;
    dp[i] += h;
    dm[i] -= h;
    jac.col(i) = (f(dp) - f(dm)) / (2.0 * h);
  }
  return jac;
}

double violation_of(const Eigen::VectorXd& constraint) {
  double v = 0.0;
  for (int i = 0; i < constraint.size(); ++i) v = std::max(v, std::abs(constraint[i]));
  return v;
}

template <typename Ev, typename Vec>
void descend(const Ev& ev, Vec& d, const SolverConfig& cfg) {
  constexpr int n = Vec::RowsAtCompileTime;
  // Trust region keeps each start in its own basin; without it an early
  // Gauss-Newton step can hop to a flush family far from the guess.
  const double kMaxStep = 0.1;
  double lambda = 1e-3;
  for (int iter = 0; iter < cfg.max_inner; ++iter) {
    const Eigen::VectorXd r = ev.residual(d);
    const double c = r.squaredNorm();
    const auto f = [&](const Vec& x) { return ev.residual(x); };
    const Eigen::MatrixXd jac =
        numeric_jacobian(f, d, static_cast<int>(r.size()), cfg.fd_step);
    const Eigen::Matrix<double, n, n> jtj = jac.transpose() * jac;
    const Vec jtr = jac.transpose() * r;

    bool improved = false;
    Vec step = Vec::Zero();
    for (int trial = 0; trial < 8; ++trial) {
      Eigen::Matrix<double, n, n> h = jtj;
      h.diagonal().array() += lambda;
      step = -h.ldlt().solve(jtr);
      if (step.norm() > kMaxStep) step *= kMaxStep / step.norm();
      const double c_new = ev.residual(d + step).squaredNorm();
      if (c_new < c) {
        d += step;
        lambda = std::max(lambda * 0.5, 1e-9);
        improved = true;
        break;
      }
      lambda = std::min(lambda * 8.0, 1e12);
    }
    if (!improved) break;
    if (step.norm() < 1e-11) break;
  }
}

template <typename Ev, typename Vec>
void polish(const Ev& ev, Vec& d, const SolverConfig& cfg) {
  for (int iter = 0; iter < 25; ++iter) {
    const Eigen::VectorXd r = ev.constraint_residual(d);
    const double v = violation_of(r);
    if (v <= 1e-12) return;
    const auto f = [&](const Vec& x) { return ev.constraint_residual(x); };
    const Eigen::MatrixXd jac =
        numeric_jacobian(f, d, static_cast<int>(r.size()), cfg.fd_step);
    Vec step = -jac.completeOrthogonalDecomposition().solve(r);
    bool accepted = false;
    for (int half = 0; half < 6; ++half) {
      if (violation_of(ev.constraint_residual(d + step)) < v) {
        d += step;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return;
  }
}

}  // namespace

SolveResult solve_pose(const ConstraintSystem& sys, const Pose& guess,
                       const SolverConfig& cfg) {
  const double kYaw = 10.0 * M_PI / 180.0;
  std::vector<Vector6d> starts;
  starts.push_back(Vector6d::Zero());
  const double offs[7][3] = {{0.02, 0.0, 0.0},  {-0.02, 0.0, 0.0}, {0.0, 0.02, 0.0},
                             {0.0, -0.02, 0.0}, {0.0, 0.0, kYaw},  {0.0, 0.0, -kYaw},
                             {0.02, 0.02, kYaw}};
  for (const auto& o : offs) {
    Vector6d d = Vector6d::Zero();
    d[0] = o[0];
    d[1] = o[1];
    d[5] = o[2];
    starts.push_back(d);
  }
  if (static_cast<int>(starts.size()) > cfg.multistarts)
    starts.resize(static_cast<size_t>(std::max(cfg.multistarts, 1)));

  bool have_best = false;
  SolveResult best;
  for (const Vector6d& s : starts) {
    Vector6d d = s;
    double mu = cfg.mu0;
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
      Evaluator ev{sys, guess, mu};
      descend(ev, d, cfg);
      if (violation_of(ev.constraint_residual(d)) <= cfg.tol) break;
      mu *= cfg.mu_growth;
    }
    Evaluator ev{sys, guess, mu};
    polish(ev, d, cfg);

    SolveResult r;
    r.pose = chart(guess, d);
    r.max_violation = violation_of(ev.constraint_residual(d));
    r.objective =
        sys.cost_terms ? sys.cost_terms(r.pose).squaredNorm() : 0.0;
    r.feasible = r.max_violation <= cfg.accept;

    // The solve is a local projection of the guess. When the guess-seeded
    // start converges, take it; the perturbed starts only rescue solves
    // whose primary start stalls, so they cannot drag the solution into a
    // different contact family that happens to score better.
    if (r.feasible && (s.array() == 0.0).all()) return r;

    bool take = false;
    if (!have_best) {
      take = true;
    } else if (r.feasible != best.feasible) {
      take = r.feasible;
    } else if (!r.feasible) {
      take = r.max_violation < best.max_violation;
    } else if (std::abs(r.objective - best.objective) > 1e-12) {
      take = r.objective < best.objective;
    } else {
      for (int i = 0; i < 3; ++i) {
        if (r.pose.p[i] != best.pose.p[i]) {
          take = r.pose.p[i] < best.pose.p[i];
          break;
        }
      }
    }
    if (take) {
      best = r;
      have_best = true;
    }
  }
  return best;
}

FeasibleResult solve_feasible(const GripperSystem& sys,
                              const GripperConfig& seed,
                              const SolverConfig& cfg) {
  const double kYaw = 10.0 * M_PI / 180.0;
  std::vector<Vector7d> starts;
  starts.push_back(Vector7d::Zero());
  const double offs[7][3] = {{0.02, 0.0, 0.0},  {-0.02, 0.0, 0.0}, {0.0, 0.02, 0.0},
                             {0.0, -0.02, 0.0}, {0.0, 0.0, kYaw},  {0.0, 0.0, -kYaw},
                             {0.02, 0.02, kYaw}};
  for (const auto& o : offs) {
    Vector7d d = Vector7d::Zero();
    d[0] = o[0];
    d[1] = o[1];
    d[5] = o[2];
    starts.push_back(d);
  }
  if (static_cast<int>(starts.size()) > cfg.multistarts)
    starts.resize(static_cast<size_t>(std::max(cfg.multistarts, 1)));

  bool have_best = false;
  FeasibleResult best;
  for (const Vector7d& s : starts) {
    Vector7d d = s;
    double mu = cfg.mu0;
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
      GripperEvaluator ev{sys, seed, mu};
      descend(ev, d, cfg);
      if (violation_of(ev.constraint_residual(d)) <= cfg.tol) break;
      mu *= cfg.mu_growth;
    }
    GripperEvaluator ev{sys, seed, mu};
    polish(ev, d, cfg);

    FeasibleResult r;
    r.config = gchart(seed, d);
    r.max_violation = violation_of(ev.constraint_residual(d));
    r.feasible = r.max_violation <= cfg.accept;

    // Feasibility is the whole objective, so the seeded start wins outright
    // and the perturbed fan only rescues a stalled seed.
    if (r.feasible && (s.array() == 0.0).all()) return r;

    bool take = false;
    if (!have_best) {
      take = true;
    } else if (r.feasible != best.feasible) {
      take = r.feasible;
    } else if (!r.feasible) {
      take = r.max_violation < best.max_violation;
    } else {
      for (int i = 0; i < 3; ++i) {
        if (r.config.pose.p[i] != best.config.pose.p[i]) {
          take = r.config.pose.p[i] < best.config.pose.p[i];
          break;
        }
      }
    }
    if (take) {
      best = r;
      have_best = true;
    }
  }
  return best;
}

}  // namespace extman
