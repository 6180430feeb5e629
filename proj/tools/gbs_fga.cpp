// Copyright 2026 The gbs-fga Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// gbs_fga: instance generation, solving, training and success-fraction sweeps
// for GBS-based flight-gate assignment.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gbs/errors.hpp"
#include "gbs/harness.hpp"
#include "gbs/json_io.hpp"

namespace fs = std::filesystem;
using namespace gbs;

namespace {

enum ExitCode { kOk = 0, kInvalidInput = 2, kCapacity = 3, kTrainingFailed = 4, kPartialSweep = 5 };

struct TrainFlags {
  std::optional<double> alpha;
  std::optional<int> shots;
  std::optional<int> mask_size;
  std::optional<int> max_evals;
  std::optional<std::string> optimizer;
  std::optional<std::string> mask_rule;
  std::optional<double> adam_lr;
  std::optional<int> adam_steps;
  std::optional<double> init_scale;
  std::optional<double> rho_end;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> thresholds;
  std::optional<int> enumeration_cap;
  std::optional<double> timeout;
};

struct PlanFlags {
  std::optional<std::vector<std::string>> sizes;
  std::optional<int> instances;
  std::optional<int> restarts;
  std::optional<std::vector<double>> alphas;
  std::optional<std::vector<double>> thresholds;
  std::optional<std::uint64_t> base_seed;
  std::optional<int> workers;
  std::optional<double> timeout;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_alpha) {
  if (with_alpha) cmd->add_option("--alpha", f.alpha, "CVaR tail fraction in (0, 1]");
  cmd->add_option("--shots", f.shots, "samples per cost evaluation (0 = exact distribution)");
  cmd->add_option("--mask-size", f.mask_size, "trainable theta entries (default 3N)");
  cmd->add_option("--max-evals", f.max_evals, "evaluation budget (default 50N)");
  cmd->add_option("--optimizer", f.optimizer, "linear-approx | adam");
  cmd->add_option("--mask-rule", f.mask_rule, "algebraic | absolute");
  cmd->add_option("--adam-lr", f.adam_lr);
  cmd->add_option("--adam-steps", f.adam_steps);
  cmd->add_option("--init-scale", f.init_scale, "initial theta entries uniform in [-s, s]");
  cmd->add_option("--rho-end", f.rho_end, "final trust radius of the linear-approximation optimizer");
  cmd->add_option("--train-seed", f.seed, "training seed");
  cmd->add_option("--enumeration-cap", f.enumeration_cap, "largest N evaluated by full enumeration");
  if (with_alpha) {
    cmd->add_option("--thresholds", f.thresholds, "fidelity thresholds")->delimiter(',');
    cmd->add_option("--timeout", f.timeout, "wall-clock budget in seconds (0 = none)");
  }
}

void apply(const TrainFlags& f, TrainConfig& cfg) {
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.shots) cfg.shots_k = *f.shots;
  if (f.mask_size) cfg.mask_size = *f.mask_size;
  if (f.max_evals) cfg.max_evals = *f.max_evals;
  if (f.optimizer) cfg.optimizer = optimizer_from_string(*f.optimizer);
  if (f.mask_rule) cfg.mask_rule = mask_rule_from_string(*f.mask_rule);
  if (f.adam_lr) cfg.adam_lr = *f.adam_lr;
  if (f.adam_steps) cfg.adam_steps = *f.adam_steps;
  if (f.init_scale) cfg.init_scale = *f.init_scale;
  if (f.rho_end) cfg.rho_end = *f.rho_end;
  if (f.seed) cfg.seed = *f.seed;
  if (f.thresholds) cfg.thresholds = *f.thresholds;
  if (f.enumeration_cap) cfg.enumeration_cap = *f.enumeration_cap;
  if (f.timeout) cfg.time_budget_s = *f.timeout;
}

void add_plan_flags(CLI::App* cmd, PlanFlags& f) {
  cmd->add_option("--sizes", f.sizes, "sizes as FxG or mode counts, comma separated")->delimiter(',');
  cmd->add_option("--instances", f.instances, "instances per size");
  cmd->add_option("--base-seed", f.base_seed, "seed of the first instance of each size");
}

void add_sweep_flags(CLI::App* cmd, PlanFlags& f) {
  cmd->add_option("--restarts", f.restarts, "training restarts per instance and alpha");
  cmd->add_option("--alphas", f.alphas, "CVaR tail fractions")->delimiter(',');
  cmd->add_option("--thresholds", f.thresholds, "fidelity thresholds")->delimiter(',');
  cmd->add_option("--workers", f.workers, fmt::format("parallel runs (also ${})", harness::kWorkersEnv));
  cmd->add_option("--timeout", f.timeout, "wall-clock budget per run in seconds (0 = none)");
}

// Precedence: flags > environment > config file > defaults.
harness::ExperimentPlan build_plan(const std::string& config, const PlanFlags& f, const TrainFlags& tf) {
  harness::ExperimentPlan plan = harness::default_plan();
  if (!config.empty()) plan = harness::plan_from_json(io::read_json(config), plan);
  if (const char* env = std::getenv(harness::kWorkersEnv); env && *env) {
    try {
      plan.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw InputError(fmt::format("{} must be an integer, got '{}'", harness::kWorkersEnv, env));
    }
  }
  if (f.sizes) {
    plan.sizes.clear();
    for (const auto& s : *f.sizes) plan.sizes.push_back(harness::parse_size(s));
  }
  if (f.instances) plan.instances_per_size = *f.instances;
  if (f.restarts) plan.restarts = *f.restarts;
  if (f.alphas) plan.alphas = *f.alphas;
  if (f.thresholds) plan.thresholds = *f.thresholds;
  if (f.base_seed) plan.base_seed = *f.base_seed;
  if (f.workers) plan.workers = *f.workers;
  if (f.timeout) plan.run_timeout_s = *f.timeout;
  apply(tf, plan.train);
  return plan;
}

TrainConfig load_train_config(const std::string& config) {
  if (config.empty()) return {};
  const io::Json j = io::read_json(config);
  return io::train_config_from_json(j.contains("train") ? j.at("train") : j);
}

int run(int argc, char** argv) {
  CLI::App app{"Gaussian boson sampling CVaR training for flight-gate assignment"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string input;
  std::string solution;
  PlanFlags pf;
  TrainFlags tf;
  bool quiet = false;

  auto* gen = app.add_subcommand("generate", "write random instances {N}_{seed}.json");
  gen->add_option("--config", config, "plan file");
  add_plan_flags(gen, pf);
  gen->add_option("-o,--out", out, "output directory")->required();

  auto* solve = app.add_subcommand("solve", "brute-force an instance and write <name>.solution.json");
  solve->add_option("instance", input)->required();

  auto* trn = app.add_subcommand("train", "train on one instance and write a run record");
  trn->add_option("instance", input)->required();
  trn->add_option("--config", config, "train config file (keys of a plan's 'train' object)");
  trn->add_option("--solution", solution, "ground truth file (default <name>.solution.json, else solved)");
  trn->add_option("-o,--out", out, "record path (default <name>.record.json)");
  add_train_flags(trn, tf, true);

  auto* exp = app.add_subcommand("experiment", "run a success-fraction sweep");
  exp->add_option("--config", config, "plan file");
  add_plan_flags(exp, pf);
  add_sweep_flags(exp, pf);
  add_train_flags(exp, tf, false);
  exp->add_option("-o,--out", out, "output directory")->required();
  exp->add_flag("-q,--quiet", quiet, "no per-run progress");

  auto* ver = app.add_subcommand("verify", "recompute a sweep report from its run records");
  ver->add_option("dir", input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  if (*gen) {
    harness::ExperimentPlan plan = build_plan(config, pf, tf);
    if (plan.sizes.empty() || plan.instances_per_size < 1) throw InputError("nothing to generate");
    const auto files = harness::generate_instances(plan.sizes, plan.instances_per_size, plan.base_seed, out);
    for (const auto& f : files) std::cout << f.string() << "\n";
    return kOk;
  }

  if (*solve) {
    const GroundTruth gt = harness::solve_instance_file(input);
    std::cout << fmt::format("min_value {} with {} minimizer(s) -> {}\n", gt.min_value, gt.minimizers.size(),
                             harness::solution_path(input).string());
    return kOk;
  }

  if (*trn) {
    const FgaInstance inst = io::read_instance(input);
    if (solution.empty() && fs::exists(harness::solution_path(input))) {
      solution = harness::solution_path(input).string();
    }
    const GroundTruth truth = solution.empty() ? brute_force_solve(assemble_qubo(inst))
                                               : io::ground_truth_from_json(io::read_json(solution));
    TrainConfig cfg = load_train_config(config);
    apply(tf, cfg);
    const harness::RunRecord rec = harness::run_training(inst, truth, cfg);
    if (out.empty()) {
      fs::path p = input;
      p.replace_extension(".record.json");
      out = p.string();
    }
    io::write_json(out, rec.to_json());
    const io::Json& res = rec.body.at("result");
    std::cout << fmt::format("fidelity {} after {} evaluations -> {}\n", res.at("final_fidelity").get<double>(),
                             res.at("n_evals").get<int>(), out);
    if (rec.failed()) {
      std::cerr << "training failed: " << rec.error << "\n";
      return kTrainingFailed;
    }
    return kOk;
  }

  if (*exp) {
    const harness::ExperimentPlan plan = build_plan(config, pf, tf);
    const auto summary = harness::run_experiment(plan, out, quiet ? nullptr : &std::cerr);
    std::cout << fmt::format("{} runs ({} executed, {} reused, {} errors) -> {}\n", summary.n_runs,
                             summary.n_executed, summary.n_reused, summary.n_errors, (fs::path(out) / "report.csv").string());
    for (const auto& r : summary.rows) {
      std::cout << fmt::format("N={:<3} alpha={:<5} t={:<5} success={:.3f} ({} instances)\n", r.n_modes, r.alpha,
                               r.threshold, r.success_fraction, r.n_instances);
    }
    return summary.n_errors > 0 ? kPartialSweep : kOk;
  }

  if (*ver) {
    const auto result = harness::verify_experiment(input);
    for (const auto& p : result.problems) std::cerr << p << "\n";
    if (!result.ok()) return kInvalidInput;
    std::cout << "report matches run records\n";
    return kOk;
  }
  return kInvalidInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return kCapacity;
  } catch (const TrainingFailedError& e) {
    std::cerr << "training failed: " << e.what() << "\n";
    return kTrainingFailed;
  } catch (const TimeoutError& e) {
    std::cerr << "timeout: " << e.what() << "\n";
    return kTrainingFailed;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
