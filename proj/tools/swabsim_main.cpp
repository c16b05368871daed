// Command line front end: single trials, the full factorial matrix,
// trajectory optimisation, stats recomputation and the selftest suite.

#include "CLI11.hpp"

#include "swabsim/config.hpp"
#include "swabsim/selftest.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace swabsim;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string controller, motion, phantom, side;
  int workers = 0;
  bool emit_timeseries = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--seed", f.seed, "seed (trial seed or matrix master seed)")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--controller", f.controller, "controller preset (S1.0..D2.0)");
  cmd->add_option("--motion", f.motion, "head motion preset (None/Light/Medium/Heavy)");
  cmd->add_option("--phantom", f.phantom, "phantom model (A or B)");
  cmd->add_option("--side", f.side, "nostril side (Left or Right)");
  cmd->add_option("--workers", f.workers, "worker threads for the matrix");
  cmd->add_flag("--emit-timeseries", f.emit_timeseries, "write per-trial time series CSVs");
}

AppConfig resolve(const CommonFlags& f) {
  AppConfig cfg = f.config_path.empty() ? AppConfig{} : load_config(f.config_path);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (f.seed_set) {
    cfg.master_seed = f.seed;
    cfg.world.sim.seed = f.seed;
  }
  if (!f.controller.empty()) {
    cfg.world.spec.controller = f.controller;
    controller_preset(f.controller);  // validate
    cfg.world.controller = ControllerConfig{};
    cfg.world.controller.name.clear();
  }
  if (!f.motion.empty()) cfg.world.spec.motion = parse_motion(f.motion);
  if (!f.phantom.empty()) cfg.world.spec.phantom = parse_phantom(f.phantom);
  if (!f.side.empty()) cfg.world.spec.side = parse_side(f.side);
  if (f.workers > 0) cfg.workers = f.workers;
  if (f.emit_timeseries) cfg.emit_timeseries = true;
  return cfg;
}

int cmd_trial(const CommonFlags& flags) {
  AppConfig cfg = resolve(flags);
  cfg.world.spec.seed = cfg.world.sim.seed;
  const TrialRecord rec = run_trial(cfg.world);
  const MeasureSet m = compute_measures(rec);

  std::cout << rec.to_jsonl() << "\n";
  std::cout << "outcome: " << outcome_name(rec.outcome) << ", reached: " << (rec.reached ? "yes" : "no");
  if (m.time_to_np) std::cout << ", time to nasopharynx: " << *m.time_to_np << " s";
  std::cout << "\n";

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream(cfg.out_dir + "/trial.jsonl") << rec.to_jsonl() << "\n";
    if (cfg.emit_timeseries)
      std::ofstream(cfg.out_dir + "/trial_timeseries.csv") << rec.series_to_csv();
  }
  return rec.outcome == Outcome::Faulted ? 1 : 0;
}

int cmd_matrix(const CommonFlags& flags) {
  AppConfig cfg = resolve(flags);
  MatrixConfig mc = cfg.matrix_config();
  const MatrixResult res = run_matrix(mc);
  std::cout << res.summary_text() << "\n" << res.stats().to_text();
  if (res.fault_count > 0)
    std::cout << "\n" << res.fault_count << " trial(s) faulted; see trials.jsonl\n";
  if (!mc.out_dir.empty()) std::cout << "\nresults written to " << mc.out_dir << "\n";
  return 0;
}

int cmd_optimize(const CommonFlags& flags) {
  AppConfig cfg = resolve(flags);
  const SwabBeam& beam = cfg.world.swab;
  const PhantomId phantom = cfg.world.spec.phantom;

  const NasalCorridor left = make_corridor(phantom, Side::Left);
  const NasalCorridor right = make_corridor(phantom, Side::Right);
  const TrajParams opt_left = optimize_trajectory(cfg.world.traj_left, left, beam);
  const TrajParams opt_right = optimize_trajectory(cfg.world.traj_right, right, beam);

  std::cout << "left:  chi=" << opt_left.chi << " e1=" << opt_left.e1 << " e2=" << opt_left.e2
            << " energy=" << strain_energy(opt_left, left, beam) << " J\n";
  std::cout << "right: chi=" << opt_right.chi << " e1=" << opt_right.e1 << " e2=" << opt_right.e2
            << " energy=" << strain_energy(opt_right, right, beam) << " J\n";

  const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/trajectory.json";
  save_trajectory_params(path, opt_left, opt_right);
  std::cout << "parameters written to " << path << "\n";
  return 0;
}

int cmd_stats(const CommonFlags& flags, const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "cannot open " << csv_path << "\n";
    return 1;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::cout << stats_from_csv(text).to_text();
  (void)flags;
  return 0;
}

int cmd_selftest(const CommonFlags& flags, int criterion) {
  AppConfig cfg = resolve(flags);
  SelfTest st(cfg);
  if (criterion > 0) {
    const CriterionResult res = st.run_criterion(criterion);
    std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << ": " << res.name << " ("
              << res.detail << ")\n";
    return res.pass ? 0 : 1;
  }
  return st.run_all(std::cout) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-loop nasopharyngeal swab insertion simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string csv_path;
  int criterion = 0;

  auto* trial = app.add_subcommand("trial", "run a single trial");
  add_common(trial, flags);
  auto* matrix = app.add_subcommand("matrix", "run the full experiment matrix");
  add_common(matrix, flags);
  auto* optimize = app.add_subcommand("optimize", "optimise the insertion trajectory");
  add_common(optimize, flags);
  auto* stats = app.add_subcommand("stats", "recompute statistics from a measures CSV");
  add_common(stats, flags);
  stats->add_option("csv", csv_path, "measures.csv from a matrix run")->required();
  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  add_common(selftest, flags);
  selftest->add_option("--criterion", criterion, "run a single criterion (1-12)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (trial->parsed()) return cmd_trial(flags);
    if (matrix->parsed()) return cmd_matrix(flags);
    if (optimize->parsed()) return cmd_optimize(flags);
    if (stats->parsed()) return cmd_stats(flags, csv_path);
    if (selftest->parsed()) return cmd_selftest(flags, criterion);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
