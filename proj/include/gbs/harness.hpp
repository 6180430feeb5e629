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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gbs/json_io.hpp"
#include "gbs/optim.hpp"
#include "gbs/problems.hpp"

namespace gbs::harness {

/// Worker-pool width override read by the command-line front end.
inline constexpr const char* kWorkersEnv = "GBS_FGA_WORKERS";

struct SizeSpec {
  int n_flights = 0;
  int n_gates = 0;

  int n_modes() const { return n_flights * n_gates; }
  friend bool operator==(const SizeSpec&, const SizeSpec&) = default;
};

/// |F| <= |G| with |F| as large as possible, e.g. 12 -> 3x4.
SizeSpec default_factorization(int n_modes);
/// "3x2" (flights x gates) or a bare mode count such as "12".
SizeSpec parse_size(const std::string& text);
std::string to_string(const SizeSpec& size);

struct ExperimentPlan {
  std::vector<SizeSpec> sizes;
  int instances_per_size = 50;
  int restarts = 5;
  std::vector<double> alphas{0.01, 0.1, 0.25, 1.0};
  std::vector<double> thresholds{0.1, 0.01};
  std::uint64_t base_seed = 0;
  /// alpha and thresholds come from the plan; the rest is used as given.
  TrainConfig train;
  /// 0 picks the hardware concurrency.
  int workers = 0;
  /// Per-run wall-clock budget in seconds; 0 disables it.
  double run_timeout_s = 600.0;

  /// Throws InputError on an invalid plan and CapacityError when a size
  /// exceeds the brute-force cap.
  void validate() const;
};

/// N in {6, 8, 10, 12, 14, 16} with the default factorization.
ExperimentPlan default_plan();
/// N in {6, 8}, 10 instances, 5 restarts, alphas {0.1, 1.0}.
ExperimentPlan desk_plan();

io::Json to_json(const ExperimentPlan& plan);
/// Overlays the keys present in `j` onto `base`.
ExperimentPlan plan_from_json(const io::Json& j, ExperimentPlan base = default_plan());

/// "{N}_{seed}.json".
std::string instance_file_name(int n_modes, std::uint64_t seed);
std::filesystem::path solution_path(const std::filesystem::path& instance_file);

/// Instance i of each size gets seed base_seed + i. Returns the written paths.
std::vector<std::filesystem::path> generate_instances(const std::vector<SizeSpec>& sizes, int count,
                                                      std::uint64_t base_seed, const std::filesystem::path& dir);

/// Brute-force solves the instance and writes the solution file beside it.
GroundTruth solve_instance_file(const std::filesystem::path& instance_file);

/// One training run as stored on disk.
struct RunRecord {
  io::Json body;
  double wall_time_s = 0.0;
  std::string timestamp;
  /// Empty on success, otherwise "timeout", "training-failed", ...
  std::string error;

  bool failed() const { return !error.empty(); }
  /// Body followed by a "metadata" object with the wall time and timestamp.
  io::Json to_json() const;
  static RunRecord from_json(const io::Json& j);
};

/// Trains and packs the outcome. Training failures and timeouts are caught
/// and recorded in `error`; other errors propagate.
RunRecord run_training(const FgaInstance& inst, const GroundTruth& truth, const TrainConfig& config);

struct ReportRow {
  int n_modes = 0;
  double alpha = 0.0;
  double threshold = 0.0;
  double success_fraction = 0.0;
  int n_instances = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ExperimentSummary {
  int n_runs = 0;
  int n_executed = 0;
  int n_reused = 0;
  int n_errors = 0;
  std::vector<ReportRow> rows;
};

/// Runs the full sweep into `out_dir`:
///   instances/  generated instances and solutions
///   runs/       one record per run, named by the run's content hash
///   report.csv, report.json, instances.csv, runs.csv
/// Existing run records are reused. Failed runs count as unsuccessful.
ExperimentSummary run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                                 std::ostream* log = nullptr);

struct VerifyResult {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Recomputes the report from the run records in `out_dir` and compares it
/// with report.csv and report.json.
VerifyResult verify_experiment(const std::filesystem::path& out_dir);

}  // namespace gbs::harness
