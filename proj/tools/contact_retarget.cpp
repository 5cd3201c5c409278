#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "extman/errors.hpp"
#include "extman/pipeline.hpp"
#include "extman/plot.hpp"
#include "extman/templates.hpp"

namespace {

extman::ObjectSet find_object(const std::string& name) {
  for (const extman::ObjectSet& o : extman::standard_objects())
    if (o.name == name) return o;
  if (name == extman::short_object().name) return extman::short_object();
  throw extman::ParseError("unknown object set '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace extman;

  CLI::App app{"Retarget recorded push/pivot/grasp demos to new scenes and objects"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check a demo or a saved run");
  std::string v_demo, v_traj;
  bool v_json = false;
  validate->add_option("--demo", v_demo, "demo json file");
  validate->add_option("--traj", v_traj, "trajectory jsonl file to audit");
  validate->add_flag("--json", v_json, "machine readable output");

  auto* run = app.add_subcommand("run", "Retarget a demo and execute it");
  std::string r_task, r_template, r_object = "cracker", r_out;
  uint64_t r_seed = 1;
  bool r_json = false, r_ablate = false;
  int r_max_steps = 0;
  double r_tol = 0.0;
  run->add_option("--task", r_task, "task json file");
  run->add_option("--template", r_template,
                  "task family: avoidance, storage, grasping, retrieval");
  run->add_option("--object", r_object, "object set name for --template");
  run->add_option("--seed", r_seed, "scene draw for --template");
  run->add_option("--out", r_out, "directory for trajectory.jsonl and report.json");
  run->add_option("--max-steps", r_max_steps, "per-segment step limit");
  run->add_option("--tol", r_tol, "solver acceptance tolerance");
  run->add_flag("--ablate-retarget-x", r_ablate,
                "chain the demo motion without projecting onto contacts");
  run->add_flag("--json", r_json, "print the run report as json");

  auto* eval = app.add_subcommand("eval", "Run a trial batch and write a csv");
  std::string e_out = "eval.csv";
  int e_seeds = 5, e_threads = 0;
  bool e_restricted = false, e_json = false;
  eval->add_option("--out", e_out, "csv path");
  eval->add_option("--seeds", e_seeds, "seeds per template/object cell");
  eval->add_option("--threads", e_threads,
                   "workers (default CONTACT_RETARGET_THREADS, then all cores)");
  eval->add_flag("--restricted", e_restricted,
                 "paired retargeted/ablated subset with shifted walls");
  eval->add_flag("--json", e_json, "print a summary as json");

  auto* plot = app.add_subcommand("plot", "Render a saved trajectory to svg");
  std::string p_traj, p_out = "trajectory.svg";
  plot->add_option("--traj", p_traj, "trajectory jsonl file")->required();
  plot->add_option("--out", p_out, "svg path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      if (!v_demo.empty()) {
        const Demo demo = load_demo(v_demo);
        try {
          validate_demo(demo);
        } catch (const DemoViolation& e) {
          if (v_json)
            std::cout << "{\"valid\": false, \"detail\": " << std::quoted(e.what())
                      << "}\n";
          else
            std::cout << "demo check failed: " << e.what() << "\n";
          return 1;
        }
        if (v_json)
          std::cout << "{\"valid\": true}\n";
        else
          std::cout << "demo ok: " << demo.segments() << " segments\n";
        if (v_traj.empty()) return 0;
      }
      if (!v_traj.empty()) {
        const AuditResult audit = audit_trajectory(load_trajectory(v_traj));
        if (v_json)
          std::cout << "{\"success\": " << (audit.success ? "true" : "false")
                    << "}\n";
        else
          std::cout << (audit.success ? "trajectory reaches every goal"
                                      : "audit failed: " + audit.detail)
                    << "\n";
        return audit.success ? 0 : 1;
      }
      throw ParseError("validate needs --demo or --traj");
    }

    if (*run) {
      TaskSpec task;
      if (!r_task.empty()) {
        task = load_task(r_task);
      } else if (!r_template.empty()) {
        task = make_trial(r_template, find_object(r_object), r_seed, false).spec;
      } else {
        throw ParseError("run needs --task or --template");
      }
      if (r_ablate) task.ablate_retarget = true;
      if (r_max_steps > 0) task.max_steps_per_segment = r_max_steps;
      if (r_tol > 0.0) task.solver.accept = r_tol;

      const RunReport report = run_task(task);
      if (!r_out.empty()) {
        std::filesystem::create_directories(r_out);
        save_trajectory(report, task, r_out + "/trajectory.jsonl");
        std::ofstream rep(r_out + "/report.json");
        rep << report_to_json_text(report);
      }
      if (r_json) {
        std::cout << report_to_json_text(report);
      } else if (report.success) {
        std::cout << "reached the goal in " << report.total_steps << " steps\n";
      } else {
        std::cout << "failed: " << report.failure_reason << "\n";
      }
      if (report.success) return 0;
      return report.failure_reason.rfind("infeasible", 0) == 0 ? 3 : 1;
    }

    if (*eval) {
      int threads = e_threads;
      if (threads <= 0) {
        if (const char* env = std::getenv("CONTACT_RETARGET_THREADS"))
          threads = std::atoi(env);
      }
      const std::vector<EvalCase> cases =
          e_restricted ? ablation_batch(e_seeds) : standard_batch(e_seeds);
      const std::vector<EvalRow> rows = evaluate(cases, threads);
      std::ofstream out(e_out);
      if (!out) throw ParseError("cannot write csv file: " + e_out);
      out << rows_to_csv(rows);

      int ok = 0;
      for (const EvalRow& r : rows) ok += r.success ? 1 : 0;
      if (e_json)
        std::cout << "{\"trials\": " << rows.size() << ", \"successes\": " << ok
                  << "}\n";
      else
        std::cout << rows.size() << " trials, " << ok << " succeeded -> " << e_out
                  << "\n";
      return 0;
    }

    if (*plot) {
      save_svg(load_trajectory(p_traj), p_out);
      std::cout << "wrote " << p_out << "\n";
      return 0;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
