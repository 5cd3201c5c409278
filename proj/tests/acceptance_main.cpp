// Standalone acceptance gate for the retargeting stack. Each criterion
// prints one pass/fail line; the exit code is the number of failures.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "extman/contact.hpp"
#include "extman/errors.hpp"
#include "extman/geometry.hpp"
#include "extman/pipeline.hpp"
#include "extman/retarget.hpp"
#include "extman/scene.hpp"
#include "extman/sim.hpp"
#include "extman/solver.hpp"
#include "extman/templates.hpp"
#include "test_support.hpp"

using namespace extman;

namespace {

// Pinned tolerances. Changing any of these weakens the gate.
constexpr double kResidualTol = 1e-6;      // contact equalities at solutions, m
constexpr double kOraclePosTol = 1e-5;     // closed-form projection match, m
constexpr double kOracleAngTol = 0.1 * M_PI / 180.0;
constexpr double kSolveBudget = 1.0;       // seconds per projection solve
constexpr double kRelTol = 1e-9;           // relative-transform drift
constexpr double kSwitchTol = 1e-3;        // runtime contact predicates, m
constexpr int kBatchTrials = 140;
constexpr int kBatchNeeded = 126;          // 90 percent of the batch
constexpr double kBatchBudget = 300.0;     // seconds for the whole batch
constexpr double kAblationGap = 0.30;      // success-rate difference
constexpr double kPullGapMargin = 0.002;   // beyond finger thickness, m
constexpr double kPenetrationTol = 1e-3;
constexpr double kEdgeDriftTol = 1e-3;     // pivot support drift, m
constexpr int kFuzzSteps = 100000;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool same_bits(const Pose& a, const Pose& b) {
  return std::memcmp(a.p.data(), b.p.data(), 3 * sizeof(double)) == 0 &&
         std::memcmp(a.q.coeffs().data(), b.q.coeffs().data(),
                     4 * sizeof(double)) == 0;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. Projected switch poses hold their contacts, stay freestanding, match
// the closed-form flush projection and return within the time budget.
Outcome criterion1() {
  testsup::Rng rng(101);
  double worst_res = 0.0, worst_pos = 0.0, worst_ang = 0.0, slowest = 0.0;
  int bad = 0;
  for (int it = 0; it < 200; ++it) {
    const double wx = rng.uni(0.70, 0.85);
    const double wyaw = rng.uni(-10.0, 10.0);
    const Scene scene = testsup::wall_scene(wx, wyaw);
    const Cuboid box = testsup::box3(rng.uni(0.03, 0.10), rng.uni(0.03, 0.08),
                                     rng.uni(0.012, 0.035));
    const double psi = wyaw * M_PI / 180.0;
    const double off = rng.uni(-20.0, 20.0) * M_PI / 180.0;
    Pose guess = Pose::rot_z(psi + off);
    guess.p = Eigen::Vector3d(rng.uni(0.35, wx - 0.05), rng.uni(-0.20, 0.20),
                              box.half.z() + rng.uni(-0.005, 0.01));
    if (it % 2) {  // tipped up, resting on the former +x face
      guess.q = (Pose::rot_z(psi + off).q * Pose::rot_y(M_PI / 2.0).q).normalized();
      guess.p.z() = box.half.x() + rng.uni(-0.01, 0.01);
    }
    const Pose want = testsup::flush_projection(scene, box, guess);

    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult r =
        retarget_switch(scene, box, guess, EnvContact::GroundWall);
    slowest = std::max(slowest, seconds_since(t0));

    if (!r.feasible || !is_freestanding(scene, box, r.pose)) {
      ++bad;
      continue;
    }
    const Eigen::VectorXd res =
        env_equality_residuals(scene, box, r.pose, EnvContact::GroundWall);
    worst_res = std::max(worst_res, res.cwiseAbs().maxCoeff());
    worst_pos = std::max(worst_pos, (r.pose.p - want.p).norm());
    worst_ang = std::max(worst_ang, angular_distance(r.pose.q, want.q));
  }
  Outcome o;
  o.pass = bad == 0 && worst_res <= kResidualTol && worst_pos <= kOraclePosTol &&
           worst_ang <= kOracleAngTol && slowest < kSolveBudget;
  o.detail = fmt("200 scenes: residual %.1e m, oracle gap %.1e m / %.4f deg, "
                 "slowest solve %.0f ms, %d rejected",
                 worst_res, worst_pos, worst_ang * 180.0 / M_PI, slowest * 1e3,
                 bad);
  return o;
}

// 2. Chained remapping preserves every switch-to-switch transform; restarting
// from the recorded start reproduces the recording bitwise.
Outcome criterion2() {
  testsup::Rng rng(202);
  double worst = 0.0;
  bool exact = true;
  for (int d = 0; d < 1000; ++d) {
    const int nseg = 1 + rng.pick(6);
    Demo demo;
    for (int k = 0; k <= nseg; ++k) {
      demo.keyframes.push_back(testsup::random_pose(rng));
      demo.times.push_back(static_cast<double>(k));
    }
    for (int k = 1; k <= nseg; ++k) {
      demo.labels.push_back("push");
      demo.switch_indices.push_back(k);
    }
    const std::vector<Pose> ref = demo_switch_poses(demo);
    const std::vector<Pose> mapped =
        remap_switches(demo, testsup::random_pose(rng));
    for (int k = 0; k < nseg; ++k) {
      const Pose a = compose(ref[k + 1], inverse(ref[k]));
      const Pose b = compose(mapped[k + 1], inverse(mapped[k]));
      worst = std::max({worst, (a.p - b.p).norm(), angular_distance(a.q, b.q)});
    }
    const std::vector<Pose> again = remap_switches(demo, demo.keyframes.front());
    for (int k = 0; k <= nseg; ++k)
      exact = exact && same_bits(again[k], ref[k]);
  }
  Outcome o;
  o.pass = worst <= kRelTol && exact;
  o.detail = fmt("1000 demos: worst relative-transform drift %.1e, identity %s",
                 worst, exact ? "bitwise" : "BROKEN");
  return o;
}

// Shared by criteria 3 and 4: the full template batch, run once.
struct BatchResult {
  size_t cases = 0;
  int successes = 0;
  double seconds = 0.0;
  long switches = 0;
  long violations = 0;
  std::string first_failure;
};

const BatchResult& standard_batch_result() {
  static const BatchResult cached = [] {
    BatchResult out;
    const std::vector<EvalCase> cases = standard_batch(5);
    out.cases = cases.size();
    std::vector<RunReport> reports(cases.size());

    const auto t0 = std::chrono::steady_clock::now();
    std::atomic<size_t> next{0};
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&cases, &reports, &next] {
        for (size_t i; (i = next.fetch_add(1)) < cases.size();)
          reports[i] = run_task(cases[i].spec);
      });
    for (std::thread& t : pool) t.join();
    out.seconds = seconds_since(t0);

    for (size_t i = 0; i < cases.size(); ++i) {
      const RunReport& rep = reports[i];
      if (!rep.success) {
        if (out.first_failure.empty())
          out.first_failure = cases[i].task + "/" + cases[i].object + " seed " +
                              std::to_string(cases[i].seed) + ": " +
                              rep.failure_reason;
        continue;
      }
      ++out.successes;

      // State at the end of segment s: last trajectory point of that segment.
      const Scene& scene = cases[i].spec.scene;
      const Cuboid& box = cases[i].spec.object.box;
      const auto& pts = rep.trajectory.points;
      if (pts.empty()) continue;
      size_t k = 0;
      for (int s = 0; s + 1 < static_cast<int>(rep.goals.size()); ++s) {
        while (k + 1 < pts.size() && pts[k + 1].segment <= s) ++k;
        const Pose& at = pts[k].state.object;
        const EnvContact before = primitive_env_contact(rep.goals[s].primitive);
        const EnvContact after =
            primitive_env_contact(rep.goals[s + 1].primitive);
        ++out.switches;
        if (!is_freestanding(scene, box, at, kSwitchTol) ||
            !satisfies_env(scene, box, at, before, kSwitchTol) ||
            !satisfies_env(scene, box, at, after, kSwitchTol))
          ++out.violations;
      }
    }
    return out;
  }();
  return cached;
}

// 3. Every executed switch in a successful run is freestanding and holds
// both adjacent segments' environment contacts.
Outcome criterion3() {
  const BatchResult& b = standard_batch_result();
  Outcome o;
  o.pass = b.switches > 0 && b.violations == 0;
  o.detail = fmt("%ld executed switches across %d successful runs, "
                 "%ld contact violations",
                 b.switches, b.successes, b.violations);
  return o;
}

// 4. The four-template batch succeeds at 90 percent within the time budget.
Outcome criterion4() {
  const BatchResult& b = standard_batch_result();
  Outcome o;
  o.pass = b.cases == kBatchTrials && b.successes >= kBatchNeeded &&
           b.seconds < kBatchBudget;
  o.detail = fmt("%d/%zu trials succeeded in %.0f s", b.successes, b.cases,
                 b.seconds);
  if (!b.first_failure.empty())
    o.detail += "; first failure " + b.first_failure;
  return o;
}

// 5. Skipping the projection on shifted-wall grasping scenes costs at least
// 30 points, and every ablated failure is an unmet contact precondition.
Outcome criterion5() {
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<EvalRow> rows =
      evaluate(ablation_batch(5), static_cast<int>(workers));
  int rn = 0, rs = 0, an = 0, as = 0, bad_reason = 0;
  std::string sample;
  for (const EvalRow& r : rows) {
    if (r.variant == "retargeted") {
      ++rn;
      rs += r.success ? 1 : 0;
    } else {
      ++an;
      as += r.success ? 1 : 0;
      if (!r.success && r.failure_reason.rfind("precondition:", 0) != 0) {
        ++bad_reason;
        if (sample.empty()) sample = r.failure_reason;
      }
    }
  }
  const double gap =
      static_cast<double>(rs) / rn - static_cast<double>(as) / an;
  Outcome o;
  o.pass = rn == 35 && an == 35 && gap >= kAblationGap && bad_reason == 0;
  o.detail = fmt("retargeted %d/%d vs ablated %d/%d, gap %.0f pp, "
                 "%d non-precondition failures",
                 rs, rn, as, an, gap * 100.0, bad_reason);
  if (!sample.empty()) o.detail += "; e.g. " + sample;
  return o;
}

// 6. Four recordings with different box shapes and absolute poses but the
// same switch motion give 20/20 successes and matching goal sequences.
Outcome criterion6() {
  const std::vector<Demo> family = grasping_demo_family();
  const ObjectSet obj = standard_objects().front();
  int successes = 0;
  double worst_pos = 0.0, worst_ang = 0.0;
  bool agree = true;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<std::vector<SwitchGoal>> seqs;
    for (const Demo& d : family) {
      EvalCase c = make_trial("grasping", obj, seed, false);
      c.spec.demo = d;
      const RunReport rep = run_task(c.spec);
      successes += rep.success ? 1 : 0;
      seqs.push_back(rep.goals);
    }
    for (size_t a = 0; a < seqs.size(); ++a)
      for (size_t b = a + 1; b < seqs.size(); ++b) {
        if (seqs[a].size() != seqs[b].size()) {
          agree = false;
          continue;
        }
        for (size_t j = 0; j < seqs[a].size(); ++j) {
          const GoalRegion& ra = seqs[a][j].region;
          const GoalRegion& rb = seqs[b][j].region;
          const double dp = (ra.center.p - rb.center.p).norm();
          const double da = angular_distance(ra.center.q, rb.center.q);
          worst_pos = std::max(worst_pos, dp);
          worst_ang = std::max(worst_ang, da);
          agree = agree && dp <= ra.pos_radius && da <= ra.ang_radius;
        }
      }
  }
  Outcome o;
  o.pass = successes == 20 && agree;
  o.detail = fmt("%d/20 runs, goal sequences agree within %.2f mm / %.3f deg",
                 successes, worst_pos * 1e3, worst_ang * 180.0 / M_PI);
  return o;
}

// 7. A short object tipped up at the wall leaves no finger room, the grasp
// constructor says so, and the pull-out variant then succeeds with enough
// clearance at the pull goal.
Outcome criterion7() {
  const ObjectSet mini = short_object();
  int runs = 0, rejections = 0;
  bool labels_ok = true, tight_ok = true, pull_ok = true;
  double tight_gap = 0.0, pull_gap = 1.0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    EvalCase c = make_trial("grasping", mini, seed, false);
    const std::vector<std::string> want = {"push", "pivot", "pull", "grasp"};
    labels_ok = labels_ok && c.spec.demo.labels == want;
    const RunReport rep = run_task(c.spec);
    runs += rep.success ? 1 : 0;
    if (rep.goals.size() != 4) {
      labels_ok = false;
      continue;
    }
    const Scene& scene = c.spec.scene;
    const Cuboid& box = c.spec.object.box;
    const double ft = scene.gripper.finger_thickness;

    const Pose& upright = rep.goals[1].region.center;
    const double g1 = wall_min_corner_distance(scene, box, upright);
    tight_gap = std::max(tight_gap, g1);
    tight_ok = tight_ok && g1 < ft;
    try {
      grasp_config(scene, box, upright, scene.gripper);
    } catch (const NoClearanceError&) {
      ++rejections;
    }

    const Pose& pulled = rep.goals[2].region.center;
    const double g2 = wall_min_corner_distance(scene, box, pulled);
    pull_gap = std::min(pull_gap, g2);
    pull_ok = pull_ok && g2 >= ft + kPullGapMargin - 1e-9;
  }
  Outcome o;
  o.pass = runs == 5 && rejections == 5 && labels_ok && tight_ok && pull_ok;
  o.detail = fmt("%d/5 pull-out runs, grasp rejected %d/5 (wall gap %.1f mm), "
                 "pull goal gap %.1f mm",
                 runs, rejections, tight_gap * 1e3, pull_gap * 1e3);
  return o;
}

// 8. Long fuzz run: freestanding objects ignore free motion, nothing ever
// penetrates, pivots stay on their supports, and a replay is bit-identical.
uint64_t fnv_mix(uint64_t h, const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

struct FuzzStats {
  uint64_t hash = 1469598103934665603ull;
  int steps = 0;
  int faults = 0;
  int fixpoint_breaks = 0;
  int penetrations = 0;
  double edge_drift = 0.0;
};

class Fuzzer {
 public:
  explicit Fuzzer(bool check) : check_(check), rng_(808) {
    const Demo demo = make_demo("grasping");
    scene_ = demo.scene;
    object_ = demo.object;
    Pose start = Pose::identity();
    start.p = Eigen::Vector3d(0.50, 0.0, object_.box.half.z());
    state_ = initial_state(scene_, start);
  }

  FuzzStats run() {
    while (stats_.steps < kFuzzSteps) {
      const int phase = rng_.pick(20);
      if (phase < 6)
        wander();
      else if (phase < 11)
        push_burst();
      else if (phase < 16)
        pivot_burst();
      else if (phase < 19)
        carry_burst();
      else
        fault_burst();
    }
    return stats_;
  }

 private:
  int budget() const { return kFuzzSteps - stats_.steps; }

  void do_step(const Action& a) {
    const bool was_attached = state_.attached;
    const Pose before = state_.object;
    const bool fixpoint = check_ && a.mode == ActionMode::Free &&
                          !was_attached &&
                          is_freestanding(scene_, object_.box, before);

    const StepResult res = step(state_, a, scene_, object_);
    state_ = res.state;

    uint64_t h = stats_.hash;
    h = fnv_mix(h, state_.object.p.data(), 3 * sizeof(double));
    h = fnv_mix(h, state_.object.q.coeffs().data(), 4 * sizeof(double));
    h = fnv_mix(h, state_.gripper.pose.p.data(), 3 * sizeof(double));
    h = fnv_mix(h, state_.gripper.pose.q.coeffs().data(), 4 * sizeof(double));
    h = fnv_mix(h, &state_.gripper.opening, sizeof(double));
    const unsigned char att = state_.attached ? 1 : 0;
    h = fnv_mix(h, &att, 1);
    h = fnv_mix(h, &res.clip, sizeof(double));
    if (res.fault) h = fnv_mix(h, res.fault->data(), res.fault->size());
    stats_.hash = h;

    ++stats_.steps;
    if (res.fault) ++stats_.faults;
    if (!check_) return;
    if (fixpoint && !same_bits(before, state_.object)) ++stats_.fixpoint_breaks;
    if (!no_penetration(scene_, object_.box, state_.object, kPenetrationTol))
      ++stats_.penetrations;
    if (a.mode == ActionMode::Pivot && !res.fault) {
      const double g = std::abs(ground_residual(object_.box, state_.object));
      const double w =
          std::abs(wall_min_corner_distance(scene_, object_.box, state_.object));
      stats_.edge_drift = std::max({stats_.edge_drift, g, w});
    }
  }

  void set_gripper_above(const Eigen::Vector3d& tip) {
    GripperConfig g;
    g.pose.q = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);  // fingers down
    g.pose.p = tip + Eigen::Vector3d(0.0, 0.0, scene_.gripper.finger_length);
    g.opening = 0.0;
    state_.gripper = g;
  }

  void wander() {
    const int n = std::min(budget(), 5 + rng_.pick(30));
    for (int k = 0; k < n; ++k) {
      Action a;
      a.translation = Eigen::Vector3d(rng_.uni(-0.0028, 0.0028),
                                      rng_.uni(-0.0028, 0.0028),
                                      rng_.uni(-0.0028, 0.0028));
      if (rng_.pick(3) == 0)
        a.rotation = Eigen::Vector3d(rng_.uni(-0.015, 0.015),
                                     rng_.uni(-0.015, 0.015),
                                     rng_.uni(-0.015, 0.015));
      if (rng_.pick(4) == 0) a.opening = rng_.uni(0.0, scene_.gripper.max_opening);
      do_step(a);
    }
  }

  void push_burst() {
    if (budget() < 2) return;
    if (!is_freestanding(scene_, object_.box, state_.object, 1e-4)) return;
    const Eigen::Matrix3d R = state_.object.q.toRotationMatrix();
    const int ax = rng_.pick(2);
    Eigen::Vector3d dir = (rng_.pick(2) ? 1.0 : -1.0) * R.col(ax);
    dir.z() = 0.0;
    if (dir.norm() < 0.7) return;  // that body axis points up on this face
    dir.normalize();

    const Eigen::Vector3d tip = state_.object.p - object_.box.half[ax] * dir;
    const Plane wp = wall_plane(scene_);
    if ((tip - wp.point).dot(wp.normal) < 0.02) return;  // tip inside the wall
    set_gripper_above(tip);

    const int n = std::min(budget(), 10 + rng_.pick(40));
    for (int k = 0; k < n; ++k) {
      Action a;
      a.mode = ActionMode::Push;
      a.translation = rng_.uni(0.001, 0.0045) * dir;
      if (rng_.pick(3) == 0)
        a.rotation = Eigen::Vector3d(0.0, 0.0, rng_.uni(-0.008, 0.008));
      do_step(a);
    }
  }

  void pivot_burst() {
    if (budget() < 2) return;
    const Plane wp = wall_plane(scene_);
    const Eigen::Vector3d lat = wall_lateral(scene_);
    const double hx = object_.box.half.x();
    const double hz = object_.box.half.z();

    Pose flush = Pose::rot_z(scene_.wall->yaw());
    flush.p = wp.point + hx * wp.normal + rng_.uni(-0.25, 0.25) * lat +
              Eigen::Vector3d(0.0, 0.0, hz);
    state_.object = flush;
    state_.attached = false;
    set_gripper_above(flush.p + hx * wp.normal);

    double theta = 0.0;
    const double cap = rng_.pick(3) == 0 ? M_PI / 2.0 : rng_.uni(0.3, 1.4);
    const int n = std::min(budget(), 15 + rng_.pick(45));
    for (int k = 0; k < n && theta < cap - 1e-12; ++k) {
      const double d = std::min(rng_.uni(0.005, kMaxStepRotation), cap - theta);
      Action a;
      a.mode = ActionMode::Pivot;
      a.rotation = d * lat;
      if (rng_.pick(6) == 0) a.translation = rng_.uni(-0.002, 0.002) * lat;
      do_step(a);
      theta += d;
    }
    const int m = std::min(budget(), rng_.pick(10));
    for (int k = 0; k < m && theta > 0.05; ++k) {
      const double d = std::min(rng_.uni(0.005, kMaxStepRotation), theta - 0.02);
      Action a;
      a.mode = ActionMode::Pivot;
      a.rotation = -d * lat;
      do_step(a);
      theta -= d;
    }
  }

  void carry_burst() {
    if (budget() < 8) return;
    const double hz = object_.box.half.z();
    Pose fp = Pose::rot_z(rng_.uni(-M_PI, M_PI));
    fp.p = Eigen::Vector3d(rng_.uni(0.30, 0.58), rng_.uni(-0.25, 0.25), hz);
    state_.object = fp;
    state_.attached = false;
    set_gripper_above(Eigen::Vector3d(fp.p.x(), fp.p.y(), 2.0 * hz));

    Action grab;
    grab.attach = true;
    do_step(grab);
    if (!state_.attached) return;

    const int n = std::min(budget() - 1, 12 + rng_.pick(30));
    for (int k = 0; k < n; ++k) {
      Action a;
      a.mode = ActionMode::Attached;
      if (k < 12) {  // clear the ground before swinging around
        a.translation = Eigen::Vector3d(rng_.uni(-0.001, 0.001),
                                        rng_.uni(-0.001, 0.001),
                                        rng_.uni(0.002, 0.0045));
      } else {
        a.translation = Eigen::Vector3d(rng_.uni(-0.0028, 0.0028),
                                        rng_.uni(-0.0028, 0.0028),
                                        rng_.uni(-0.0028, 0.0028));
        if (rng_.pick(3) == 0)
          a.rotation = Eigen::Vector3d(rng_.uni(-0.015, 0.015),
                                       rng_.uni(-0.015, 0.015),
                                       rng_.uni(-0.015, 0.015));
      }
      do_step(a);
    }
    if (budget() < 1) return;
    Action drop;
    drop.release = true;
    do_step(drop);
    if (check_ && !is_freestanding(scene_, object_.box, state_.object))
      ++stats_.fixpoint_breaks;
  }

  void fault_burst() {
    const int n = std::min(budget(), 1 + rng_.pick(4));
    for (int k = 0; k < n; ++k) {
      Action a;
      switch (rng_.pick(5)) {
        case 0:  // over the per-step translation bound
          a.translation = Eigen::Vector3d(0.006, 0.0, 0.0);
          break;
        case 1:  // press without contact
          a.mode = ActionMode::Push;
          a.translation = Eigen::Vector3d(0.003, 0.0, 0.0);
          break;
        case 2:  // pivot axis off the wall lateral
          a.mode = ActionMode::Pivot;
          a.rotation = Eigen::Vector3d(0.01, 0.01, 0.0);
          break;
        case 3:  // attached motion while free
          a.mode = ActionMode::Attached;
          a.translation = Eigen::Vector3d(0.0, 0.0, 0.003);
          break;
        default:  // attach with the fingers nowhere near
          a.attach = true;
          break;
      }
      do_step(a);
    }
  }

  bool check_;
  testsup::Rng rng_;
  Scene scene_;
  ObjectModel object_;
  SimState state_;
  FuzzStats stats_;
};

Outcome criterion8() {
  const FuzzStats a = Fuzzer(true).run();
  const FuzzStats b = Fuzzer(false).run();
  Outcome o;
  o.pass = a.steps == kFuzzSteps && a.fixpoint_breaks == 0 &&
           a.penetrations == 0 && a.edge_drift < kEdgeDriftTol &&
           a.hash == b.hash;
  o.detail = fmt("%d steps (%d faulted), fixpoint breaks %d, penetrations %d, "
                 "pivot support drift %.1e m, replay %s",
                 a.steps, a.faults, a.fixpoint_breaks, a.penetrations,
                 a.edge_drift, a.hash == b.hash ? "bit-identical" : "DIVERGED");
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    Outcome (*fn)();
  };
  const Entry entries[] = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                           {4, criterion4}, {5, criterion5}, {6, criterion6},
                           {7, criterion7}, {8, criterion8}};
  int failed = 0;
  for (const Entry& e : entries) {
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("unexpected exception: ") + ex.what();
    }
    std::printf("criterion %d: %s (%s)\n", e.id, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed;
}
