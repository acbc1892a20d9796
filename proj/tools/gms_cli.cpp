// Command-line front end. Four subcommands:
//   validate  structural checks plus the spacing/adequacy assumptions
//   run       full negotiation, audits, report files
//   baseline  condition-based and corrective comparison schedules
//   sweep     sigma-range x scenario-count sensitivity grid
// Exit codes: 0 clean, 1 usage or input error, 2 audit failure.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gms/gms.hpp"

namespace {

struct Overrides {
  int scenarios = 0;
  uint64_t seed = 0;
  double epsilon = 0.0;
  int max_iterations = 0;
  double mva_base = 0.0;
  std::string acceptance, deterioration, sampling, out = "report";
};

// Shared flags that mirror the config file keys; only flags the user passed
// are applied on top of the loaded configuration.
void add_config_flags(CLI::App* sub, Overrides& ov) {
  sub->add_option("--scenarios", ov.scenarios, "failure scenarios per fault event");
  sub->add_option("--seed", ov.seed, "master sampling seed");
  sub->add_option("--epsilon", ov.epsilon, "urgency softening term");
  sub->add_option("--max-iterations", ov.max_iterations, "negotiation round cap");
  sub->add_option("--mva-base", ov.mva_base, "per-unit MVA base");
  sub->add_option("--acceptance", ov.acceptance, "block_atomic | per_timestep")
      ->check(CLI::IsMember({"block_atomic", "per_timestep"}));
  sub->add_option("--deterioration", ov.deterioration, "per_scenario_sign | expected_bracket")
      ->check(CLI::IsMember({"per_scenario_sign", "expected_bracket"}));
  sub->add_option("--sampling", ov.sampling, "monte_carlo | stratified")
      ->check(CLI::IsMember({"monte_carlo", "stratified"}));
}

gms::ExperimentConfig load_with_overrides(const std::string& path, const CLI::App* sub,
                                          const Overrides& ov) {
  auto cfg = gms::load_config(path);
  if (sub->count("--scenarios")) cfg.scenario_count = ov.scenarios;
  if (sub->count("--seed")) cfg.seed = ov.seed;
  if (sub->count("--epsilon")) cfg.epsilon = ov.epsilon;
  if (sub->count("--max-iterations")) cfg.max_iterations = ov.max_iterations;
  if (sub->count("--mva-base")) cfg.mva_base = ov.mva_base;
  if (sub->count("--acceptance"))
    cfg.acceptance = ov.acceptance == "per_timestep" ? gms::AcceptanceMode::PerTimestep
                                                     : gms::AcceptanceMode::BlockAtomic;
  if (sub->count("--deterioration"))
    cfg.form = ov.deterioration == "expected_bracket" ? gms::DeteriorationForm::ExpectedBracket
                                                      : gms::DeteriorationForm::PerScenarioSign;
  if (sub->count("--sampling"))
    cfg.method = ov.sampling == "stratified" ? gms::SampleMethod::Stratified
                                             : gms::SampleMethod::MonteCarlo;
  return cfg;
}

const char* flag(bool b) { return b ? "yes" : "NO"; }

int cmd_validate(const gms::ExperimentConfig& cfg) {
  auto data = gms::load_dataset(cfg);
  auto report = gms::validate_inputs(data.agents, data.net, data.grid);
  for (const auto& issue : report.issues)
    std::printf("%-28s %s  %s\n", issue.check.c_str(), issue.passed ? "ok  " : "FLAG",
                issue.detail.c_str());
  std::printf("spacing_ok=%s adequacy_ok=%s structural_ok=%s\n",
              flag(report.assumption_spacing_ok), flag(report.assumption_adequacy_ok),
              flag(report.structural_ok));
  return report.all_ok() ? 0 : 2;
}

int cmd_run(const gms::ExperimentConfig& cfg, const std::string& out_dir) {
  auto data = gms::load_dataset(cfg);
  auto opts = gms::make_negotiation_options(cfg);
  auto res = gms::run_negotiation(data.agents, data.net, data.grid, opts);

  auto baselines =
      gms::run_baselines(data.agents, res.scens, data.net, data.grid, opts.form, opts.tso);

  gms::ReportInputs in;
  in.agents = &data.agents;
  in.net = &data.net;
  in.grid = &data.grid;
  in.run = &res;
  in.baselines = &baselines;
  in.form = opts.form;
  auto files = gms::emit_report(in, out_dir);

  auto budget = gms::audit_budget_balance(res);
  std::printf("converged=%s iterations=%d rejected_last=%d\n", flag(res.converged),
              res.iterations, res.history.back().rejected_slots);
  std::printf("weak_budget=%s exact_budget=%s\n", flag(budget.weak_ok), flag(budget.exact_ok));
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());

  const bool ok = res.converged && budget.weak_ok && budget.exact_ok &&
                  res.validation.all_ok();
  return ok ? 0 : 2;
}

int cmd_baseline(const gms::ExperimentConfig& cfg) {
  auto data = gms::load_dataset(cfg);
  auto opts = gms::make_negotiation_options(cfg);
  std::vector<std::vector<gms::ScenarioSet>> scens;
  for (const auto& ag : data.agents) {
    std::vector<gms::ScenarioSet> sets;
    for (size_t k = 0; k < ag.events.size(); ++k)
      sets.push_back(gms::sample_scenarios(ag.events[k], opts.scenario_count,
                                           gms::derive_event_seed(opts.master_seed, ag.id,
                                                                  static_cast<int>(k)),
                                           opts.method));
    scens.push_back(std::move(sets));
  }
  auto rows = gms::run_baselines(data.agents, scens, data.net, data.grid, opts.form, opts.tso);
  std::printf("unit\treward_condition\treward_corrective\trejected_condition\trejected_corrective\n");
  for (const auto& r : rows)
    std::printf("%d\t%.6f\t%.6f\t%d\t%d\n", r.agent_id, r.cond_reward, r.corr_reward,
                r.cond_rejected ? 1 : 0, r.corr_rejected ? 1 : 0);
  return 0;
}

int cmd_sweep(const gms::ExperimentConfig& cfg, const std::string& out_dir) {
  auto data = gms::load_dataset(cfg);
  auto opts = gms::make_negotiation_options(cfg);
  auto cells = gms::run_sweep(data.agents, data.net, data.grid, opts, cfg.sweep_sigma,
                              cfg.sweep_scenarios);

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto out = gms::iodetail::open_out(fs::path(out_dir) / "sweep.tsv");
  gms::iodetail::stamp(out, "sweep", {"sigma_lo", "sigma_hi", "scenarios", "converged",
                                      "iterations", "total_reward"});
  bool all_converged = true;
  for (const auto& c : cells) {
    out << gms::iodetail::num(c.sigma_lo) << '\t' << gms::iodetail::num(c.sigma_hi) << '\t'
        << c.scenario_count << '\t' << (c.converged ? 1 : 0) << '\t' << c.iterations << '\t'
        << gms::iodetail::num(c.total_reward) << '\n';
    std::printf("sigma [%g, %g] S=%d: converged=%s iterations=%d total_reward=%.6f (%.2fs)\n",
                c.sigma_lo, c.sigma_hi, c.scenario_count, flag(c.converged), c.iterations,
                c.total_reward, c.wall_seconds);
    all_converged = all_converged && c.converged;
  }
  std::printf("wrote %s/sweep.tsv\n", out_dir.c_str());
  return all_converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generation-maintenance negotiation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* validate = app.add_subcommand("validate", "check a dataset against the model assumptions");
  validate->add_option("config", config_path, "experiment config file")->required();
  add_config_flags(validate, ov);

  auto* run = app.add_subcommand("run", "negotiate, audit and write the report");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--out", ov.out, "report directory (default: report)");
  add_config_flags(run, ov);

  auto* baseline = app.add_subcommand("baseline", "score fixed comparison schedules");
  baseline->add_option("config", config_path, "experiment config file")->required();
  add_config_flags(baseline, ov);

  auto* sweep = app.add_subcommand("sweep", "sigma x scenario-count sensitivity grid");
  sweep->add_option("config", config_path, "experiment config file")->required();
  sweep->add_option("--out", ov.out, "report directory (default: report)");
  add_config_flags(sweep, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(load_with_overrides(config_path, validate, ov));
    if (run->parsed()) return cmd_run(load_with_overrides(config_path, run, ov), ov.out);
    if (baseline->parsed()) return cmd_baseline(load_with_overrides(config_path, baseline, ov));
    if (sweep->parsed()) return cmd_sweep(load_with_overrides(config_path, sweep, ov), ov.out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
