// Command-line frontend: instance generation, plan solving, Monte-Carlo
// evaluation, parameter sweeps, and the subset-sum separation instances.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmu/benders.hpp"
#include "mmu/compact.hpp"
#include "mmu/evaluate.hpp"
#include "mmu/expand.hpp"
#include "mmu/instance_io.hpp"
#include "mmu/instgen.hpp"
#include "mmu/problem.hpp"
#include "mmu/robust.hpp"

namespace {

constexpr int kExitInfeasible = 3;
constexpr int kExitLimit = 4;

mmu::UncertaintyKind parse_kind(const std::string& s) {
  if (s == "deterministic") return mmu::UncertaintyKind::deterministic;
  if (s == "interval") return mmu::UncertaintyKind::interval;
  if (s == "budgeted") return mmu::UncertaintyKind::budgeted;
  throw CLI::ValidationError("--kind", "expected deterministic, interval or budgeted");
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct SolveFlags {
  std::string instance_path;
  std::string model = "det-compact";
  std::string separation = "mincut";
  std::string sessions;  // comma-separated labels; empty = weekly model
  std::string out_path;
  double gap = 1e-4;
  double time_limit = 0.0;
  int threads = 1;
};

int run_solve(const SolveFlags& f) {
  mmu::Instance inst = mmu::read_instance(f.instance_path);

  mmu::milp::SolveConfig cfg;
  cfg.gap_tol = f.gap;
  cfg.time_limit_s = f.time_limit;
  cfg.threads = f.threads;
  mmu::SeparationKind sep = f.separation == "lp" ? mmu::SeparationKind::lp
                                                 : mmu::SeparationKind::mincut;

  mmu::Problem pb;
  mmu::ExpandedInstance expanded;
  if (!f.sessions.empty()) {
    if (f.model != "det-compact" && f.model != "det-benders")
      throw CLI::ValidationError("--sessions",
                                 "session expansion is only supported for the deterministic models");
    expanded = mmu::expand_sessions(inst, split_list(f.sessions), {},
                                    mmu::SteerableScope::all_sessions);
    pb = mmu::compile(expanded);
  } else {
    pb = mmu::compile(inst);
  }

  mmu::PlanSolve res;
  if (f.model == "det-compact") {
    res = mmu::solve_compact(pb, cfg);
  } else if (f.model == "det-benders") {
    mmu::BendersOptions opt;
    opt.separation = sep;
    opt.milp = cfg;
    res = mmu::solve_benders(pb, opt);
  } else if (f.model == "interval") {
    res = mmu::solve_interval(pb, sep, cfg);
  } else if (f.model == "budgeted") {
    mmu::BudgetedOptions opt;
    opt.milp = cfg;
    res = mmu::solve_budgeted(pb, opt);
  } else {
    throw CLI::ValidationError("--model",
                               "expected det-compact, det-benders, interval or budgeted");
  }

  for (const std::string& line : res.log) std::cout << line << "\n";
  std::cout << "status=" << mmu::milp::to_string(res.status) << " objective=" << res.objective
            << " iterations=" << res.iterations << "\n";
  if (res.status != mmu::milp::Status::optimal) {
    std::cerr << (res.status == mmu::milp::Status::infeasible
                      ? "no plan exists for this instance under the chosen model\n"
                      : "solver stopped before proving optimality\n");
    return res.status == mmu::milp::Status::infeasible ? kExitInfeasible : kExitLimit;
  }
  if (!f.out_path.empty()) mmu::write_plan(f.out_path, *res.plan);
  return 0;
}

struct EvalFlags {
  std::string instance_path;
  std::string cells_path;
  std::vector<std::string> plan_specs;  // model=path
  std::string mode = "budgeted-set";
  int count = 100;
  double omega = 0.2;
  uint64_t seed = 1;
  int outbreaks = 0;
  double outbreak_radius = 1.0;
  long long outbreak_factor = 2;
  std::string out_dir = ".";
};

int run_evaluate(const EvalFlags& f) {
  mmu::Instance inst = mmu::read_instance(f.instance_path);

  std::vector<std::pair<std::string, mmu::Plan>> plans;
  for (const std::string& spec : f.plan_specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--plan", "expected model=path, got '" + spec + "'");
    plans.push_back({spec.substr(0, eq), mmu::read_plan(spec.substr(eq + 1))});
  }
  if (plans.empty()) throw CLI::ValidationError("--plan", "at least one plan is required");

  mmu::SampleSpec spec;
  spec.count = f.count;
  spec.omega = f.omega;
  spec.seed = f.seed;
  spec.outbreaks = f.outbreaks;
  spec.outbreak_radius_km = f.outbreak_radius;
  spec.outbreak_factor = f.outbreak_factor;

  mmu::CellSet cells;
  const mmu::CellSet* cells_ptr = nullptr;
  if (f.mode == "history") {
    spec.mode = mmu::SampleMode::history;
    if (f.cells_path.empty())
      throw CLI::ValidationError("--cells", "history mode needs the generator's cells file");
    cells = mmu::read_cells(f.cells_path);
    cells_ptr = &cells;
  } else if (f.mode == "budgeted-set") {
    spec.mode = mmu::SampleMode::budgeted_set;
    if (f.outbreaks > 0)
      throw CLI::ValidationError("--outbreaks", "outbreaks apply to history mode only");
  } else {
    throw CLI::ValidationError("--mode", "expected history or budgeted-set");
  }

  std::vector<mmu::Realization> reals = mmu::sample_realizations(inst, cells_ptr, spec);
  mmu::EvaluationReport report = mmu::evaluate_models(inst, plans, reals);

  std::filesystem::create_directories(f.out_dir);
  std::string rows = f.out_dir + "/realizations.csv";
  std::string summary = f.out_dir + "/summary.csv";
  mmu::write_report_csv(report, rows, summary);
  for (const mmu::ModelSummary& s : report.summaries)
    std::cout << "model=" << s.model << " mean=" << s.mean << " max=" << s.max
              << " p95=" << s.p95 << " cost=" << s.cost << "\n";
  std::cout << "wrote " << rows << " and " << summary << "\n";
  return 0;
}

struct SweepFlags {
  mmu::GeneratorConfig base;
  std::string omegas = "0.2";
  std::string deltas = "2.0";
  std::string models = "det-benders,interval,budgeted";
  std::string out_path = "sweep.csv";
  double gap = 1e-4;
  int jobs = 1;
};

int run_sweep(const SweepFlags& f) {
  std::vector<double> omegas, deltas;
  for (const std::string& s : split_list(f.omegas)) omegas.push_back(std::stod(s));
  for (const std::string& s : split_list(f.deltas)) deltas.push_back(std::stod(s));
  std::vector<std::string> models = split_list(f.models);
  if (omegas.empty() || deltas.empty() || models.empty())
    throw CLI::ValidationError("--omegas/--deltas/--models", "lists must be non-empty");

  struct Job {
    double delta, omega;
    std::string model;
  };
  std::vector<Job> jobs;
  for (double d : deltas)
    for (double w : omegas)
      for (const std::string& m : models) jobs.push_back({d, w, m});

  auto run_cell = [&](const Job& job) -> std::string {
    mmu::GeneratorConfig cfg = f.base;
    cfg.delta_km = job.delta;
    cfg.omega = job.omega;
    cfg.kind = mmu::UncertaintyKind::budgeted;
    std::ostringstream row;
    row << job.delta << "," << job.omega << "," << job.model << ",";
    try {
      mmu::Problem pb = mmu::compile(mmu::generate_instance(cfg).instance);
      mmu::milp::SolveConfig scfg;
      scfg.gap_tol = f.gap;
      mmu::PlanSolve res;
      if (job.model == "det-compact") {
        res = mmu::solve_compact(pb, scfg);
      } else if (job.model == "det-benders") {
        mmu::BendersOptions opt;
        opt.milp = scfg;
        res = mmu::solve_benders(pb, opt);
      } else if (job.model == "interval") {
        res = mmu::solve_interval(pb, mmu::SeparationKind::mincut, scfg);
      } else if (job.model == "budgeted") {
        mmu::BudgetedOptions opt;
        opt.milp = scfg;
        res = mmu::solve_budgeted(pb, opt);
      } else {
        throw mmu::ModelError("unknown model '" + job.model + "'");
      }
      if (res.status == mmu::milp::Status::optimal)
        row << "optimal," << res.objective << "," << res.iterations;
      else
        row << mmu::milp::to_string(res.status) << ",," << res.iterations;
    } catch (const std::exception& e) {
      row << "error,,0";
      std::cerr << "sweep cell delta=" << job.delta << " omega=" << job.omega << " model="
                << job.model << ": " << e.what() << "\n";
    }
    return row.str();
  };

  std::vector<std::string> rows(jobs.size());
  int workers = std::max(1, f.jobs);
  for (size_t base = 0; base < jobs.size(); base += workers) {
    size_t batch = std::min(jobs.size() - base, size_t(workers));
    std::vector<std::future<std::string>> futs;
    for (size_t i = 1; i < batch; ++i)
      futs.push_back(std::async(std::launch::async, run_cell, jobs[base + i]));
    rows[base] = run_cell(jobs[base]);
    for (size_t i = 1; i < batch; ++i) rows[base + i] = futs[i - 1].get();
  }

  std::ofstream out(f.out_path);
  if (!out) throw mmu::ModelError("cannot write '" + f.out_path + "'");
  out << "delta_km,omega,model,status,objective,iterations\n";
  for (const std::string& r : rows) out << r << "\n";
  std::cout << "wrote " << f.out_path << " (" << rows.size() << " rows)\n";
  return 0;
}

void add_generator_flags(CLI::App* cmd, mmu::GeneratorConfig& cfg, std::string& kind) {
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--cells", cfg.n_cells, "population cells");
  cmd->add_option("--sites", cfg.n_sites, "candidate sites");
  cmd->add_option("--practices", cfg.n_practices, "practices");
  cmd->add_option("--region-km", cfg.region_km, "square region side length");
  cmd->add_option("--delta-km", cfg.delta_km, "maximum driving distance");
  cmd->add_option("--omega", cfg.omega, "walk-in fraction");
  cmd->add_option("--weeks", cfg.weeks, "simulated weeks");
  cmd->add_option("--cell-mean", cfg.cell_mean, "average weekly visits per cell");
  cmd->add_option("--cell-mean-spread", cfg.cell_mean_spread, "relative spread of cell means");
  cmd->add_option("--dispersion", cfg.dispersion, "negative binomial size parameter");
  cmd->add_option("--detour", cfg.road_detour_factor, "road detour factor");
  cmd->add_option("--session-capacity", cfg.session_capacity, "patients per session");
  cmd->add_option("--session-cost", cfg.session_cost, "cost per session");
  cmd->add_option("--site-setup-cost", cfg.site_setup_cost, "setup cost per used site");
  cmd->add_option("--site-session-cap", cfg.site_session_cap, "max sessions per site");
  cmd->add_option("--practice-cap-lo", cfg.practice_cap_lo, "practice capacity lower bound");
  cmd->add_option("--practice-cap-hi", cfg.practice_cap_hi, "practice capacity upper bound");
  cmd->add_option("--kind", kind, "uncertainty kind: deterministic, interval or budgeted");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mmuplan: strategic planning of mobile medical units\n"
      "Set MMU_MILP_BACKEND to choose the integer-programming backend "
      "(default: builtin)."};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a synthetic instance");
  mmu::GeneratorConfig gen_cfg;
  std::string gen_kind = "budgeted";
  std::string gen_out = "instance.json", gen_cells_out = "cells.json";
  add_generator_flags(gen, gen_cfg, gen_kind);
  gen->add_option("--out", gen_out, "instance output path");
  gen->add_option("--cells-out", gen_cells_out, "cell sidecar output path");

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance to a plan");
  SolveFlags sf;
  solve->add_option("--instance", sf.instance_path, "instance JSON")->required();
  solve->add_option("--model", sf.model,
                    "det-compact, det-benders, interval or budgeted");
  solve->add_option("--separation", sf.separation, "mincut or lp");
  solve->add_option("--sessions", sf.sessions,
                    "comma-separated session labels; switches to the session-specific model");
  solve->add_option("--out", sf.out_path, "plan output path");
  solve->add_option("--gap", sf.gap, "relative optimality gap");
  solve->add_option("--time-limit", sf.time_limit, "seconds per integer solve, 0 = none");
  solve->add_option("--threads", sf.threads, "solver threads");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Monte-Carlo evaluation of plans");
  EvalFlags ef;
  eval->add_option("--instance", ef.instance_path, "instance JSON")->required();
  eval->add_option("--cells", ef.cells_path, "generator cell sidecar (history mode)");
  eval->add_option("--plan", ef.plan_specs, "model=path, repeatable")->required();
  eval->add_option("--mode", ef.mode, "history or budgeted-set");
  eval->add_option("-n,--count", ef.count, "number of realizations");
  eval->add_option("--omega", ef.omega, "walk-in coin for history mode");
  eval->add_option("--seed", ef.seed, "sampling seed");
  eval->add_option("--outbreaks", ef.outbreaks, "outbreak centers per realization");
  eval->add_option("--outbreak-radius-km", ef.outbreak_radius, "outbreak radius");
  eval->add_option("--outbreak-factor", ef.outbreak_factor, "outbreak demand multiplier");
  eval->add_option("--out-dir", ef.out_dir, "directory for the CSV reports");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "objective grid over delta and omega");
  SweepFlags wf;
  std::string sweep_kind = "budgeted";
  add_generator_flags(sweep, wf.base, sweep_kind);
  sweep->get_option("--delta-km")->description("ignored; use --deltas");
  sweep->get_option("--omega")->description("ignored; use --omegas");
  sweep->add_option("--omegas", wf.omegas, "comma-separated walk-in fractions");
  sweep->add_option("--deltas", wf.deltas, "comma-separated driving distances (km)");
  sweep->add_option("--models", wf.models, "comma-separated model list");
  sweep->add_option("--out", wf.out_path, "CSV output path");
  sweep->add_option("--gap", wf.gap, "relative optimality gap");
  sweep->add_option("--jobs", wf.jobs, "parallel sweep cells");

  // reduce-subsetsum
  auto* red = app.add_subcommand("reduce-subsetsum",
                                 "emit a separation instance encoding subset sum");
  std::string red_values;
  long long red_target = 0;
  std::string red_out = "subsetsum-instance.json";
  red->add_option("--values", red_values, "comma-separated positive integers")->required();
  red->add_option("--target", red_target, "target sum")->required();
  red->add_option("--out", red_out, "instance output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      gen_cfg.kind = parse_kind(gen_kind);
      mmu::GeneratedInstance out = mmu::generate_instance(gen_cfg);
      mmu::write_instance(gen_out, out.instance);
      mmu::write_cells(gen_cells_out, out.cells);
      std::cout << "wrote " << gen_out << " (" << out.instance.origins.size() << " origins, "
                << out.instance.sites.size() << " sites, " << out.instance.practices.size()
                << " practices) and " << gen_cells_out << "\n";
      return 0;
    }
    if (solve->parsed()) return run_solve(sf);
    if (eval->parsed()) return run_evaluate(ef);
    if (sweep->parsed()) {
      wf.base.kind = parse_kind(sweep_kind);
      return run_sweep(wf);
    }
    if (red->parsed()) {
      std::vector<long long> values;
      for (const std::string& s : split_list(red_values)) values.push_back(std::stoll(s));
      mmu::SubsetSumReduction r = mmu::build_subsetsum_reduction(values, red_target);
      mmu::write_instance(red_out, r.instance);
      mmu::Problem pb = mmu::compile(r.instance);
      mmu::SeparationResult sep = mmu::separate_budgeted_mip(pb, r.x, r.route);
      std::cout << "wrote " << red_out << "\n";
      std::cout << "separation value=" << sep.value
                << " verdict=" << (sep.violated ? "yes" : "no") << "-instance";
      if (sep.violated) {
        std::cout << " subset=";
        for (size_t i = 0; i < sep.U.size(); ++i)
          std::cout << (i ? "," : "") << pb.origin_ids[sep.U[i]];
      }
      std::cout << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
