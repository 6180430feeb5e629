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

#include "gbs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "gbs/errors.hpp"

namespace gbs::harness {

namespace fs = std::filesystem;
using io::Json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t restart_seed(std::uint64_t train_seed, std::uint64_t instance_seed, int restart) {
  return splitmix64(splitmix64(train_seed ^ splitmix64(instance_seed)) + static_cast<std::uint64_t>(restart));
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

std::string num(double v) { return fmt::format("{}", v); }

Json size_to_json(const SizeSpec& s) { return Json::array({s.n_flights, s.n_gates}); }

SizeSpec size_from_json(const Json& j) {
  if (j.is_number_integer()) return default_factorization(j.get<int>());
  if (j.is_string()) return parse_size(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    return {j[0].get<int>(), j[1].get<int>()};
  }
  throw InputError("sizes must be [flights, gates], \"FxG\" or a mode count");
}

template <typename T>
void take(const Json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("plan field '{}': {}", key, e.what()));
  }
}

TrainConfig run_config(const ExperimentPlan& plan, double alpha, std::uint64_t seed) {
  TrainConfig cfg = plan.train;
  cfg.alpha = alpha;
  cfg.thresholds = plan.thresholds;
  cfg.seed = seed;
  cfg.time_budget_s = plan.run_timeout_s;
  return cfg;
}

// Everything about one run that can be derived from the plan and the instance files.
struct RunSpec {
  int size_index = 0;
  int instance_index = 0;
  int alpha_index = 0;
  int restart = 0;
  TrainConfig config;
  std::string hash;
};

struct PlannedInstance {
  SizeSpec size;
  std::string id;
  fs::path file;
  FgaInstance instance;
  std::string hash;
};

std::string instance_hash(const FgaInstance& inst) { return io::content_hash(io::dump(io::to_json(inst))); }

std::string run_hash(const std::string& inst_hash, const TrainConfig& resolved) {
  Json key;
  key["instance_hash"] = inst_hash;
  key["config"] = io::to_json(resolved);
  return io::content_hash(io::dump(key));
}

std::vector<RunSpec> plan_runs(const ExperimentPlan& plan, const std::vector<std::vector<PlannedInstance>>& instances) {
  std::vector<RunSpec> runs;
  for (std::size_t s = 0; s < plan.sizes.size(); ++s) {
    for (std::size_t i = 0; i < instances[s].size(); ++i) {
      const PlannedInstance& pi = instances[s][i];
      for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
        for (int r = 0; r < plan.restarts; ++r) {
          RunSpec spec;
          spec.size_index = static_cast<int>(s);
          spec.instance_index = static_cast<int>(i);
          spec.alpha_index = static_cast<int>(a);
          spec.restart = r;
          spec.config = run_config(plan, plan.alphas[a], restart_seed(plan.train.seed, pi.instance.seed, r))
                            .resolved(pi.size.n_modes());
          spec.hash = run_hash(pi.hash, spec.config);
          runs.push_back(std::move(spec));
        }
      }
    }
  }
  return runs;
}

fs::path run_path(const fs::path& out_dir, const std::string& hash) { return out_dir / "runs" / (hash + ".json"); }

std::optional<RunRecord> load_run(const fs::path& path, const std::string& hash) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    RunRecord rec = RunRecord::from_json(io::read_json(path));
    if (rec.body.value("run_hash", std::string{}) != hash) return std::nullopt;
    return rec;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct InstanceDetail {
  int n_modes = 0;
  std::string id;
  double alpha = 0.0;
  double best_fidelity = 0.0;
  std::vector<bool> success;
  long evals = 0;
  double wall_time_s = 0.0;
  int errors = 0;
};

struct Aggregate {
  std::vector<ReportRow> rows;
  std::vector<InstanceDetail> details;
};

double record_fidelity(const RunRecord& rec) { return rec.body.at("result").at("final_fidelity").get<double>(); }

Aggregate aggregate(const ExperimentPlan& plan, const std::vector<std::vector<PlannedInstance>>& instances,
                    const std::vector<RunRecord>& records) {
  Aggregate agg;
  std::size_t k = 0;
  for (std::size_t s = 0; s < plan.sizes.size(); ++s) {
    const int n_inst = static_cast<int>(instances[s].size());
    // success_counts[a][t]
    std::vector<std::vector<int>> counts(plan.alphas.size(), std::vector<int>(plan.thresholds.size(), 0));
    for (int i = 0; i < n_inst; ++i) {
      for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
        InstanceDetail d;
        d.n_modes = plan.sizes[s].n_modes();
        d.id = instances[s][static_cast<std::size_t>(i)].id;
        d.alpha = plan.alphas[a];
        for (int r = 0; r < plan.restarts; ++r, ++k) {
          const RunRecord& rec = records[k];
          d.best_fidelity = std::max(d.best_fidelity, record_fidelity(rec));
          d.evals += rec.body.at("result").at("n_evals").get<long>();
          d.wall_time_s += rec.wall_time_s;
          if (rec.failed()) ++d.errors;
        }
        for (std::size_t t = 0; t < plan.thresholds.size(); ++t) {
          const bool ok = d.best_fidelity > plan.thresholds[t];
          d.success.push_back(ok);
          if (ok) ++counts[a][t];
        }
        agg.details.push_back(std::move(d));
      }
    }
    for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
      for (std::size_t t = 0; t < plan.thresholds.size(); ++t) {
        agg.rows.push_back({plan.sizes[s].n_modes(), plan.alphas[a], plan.thresholds[t],
                            static_cast<double>(counts[a][t]) / n_inst, n_inst});
      }
    }
  }
  return agg;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "N,alpha,threshold,success_fraction,n_instances\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.n_modes, num(r.alpha), num(r.threshold), num(r.success_fraction),
                       r.n_instances);
  }
  return out;
}

std::string instances_csv(const ExperimentPlan& plan, const std::vector<InstanceDetail>& details) {
  std::string out = "N,instance,alpha,best_fidelity";
  for (double t : plan.thresholds) out += fmt::format(",success_t{}", num(t));
  out += ",evals,wall_time_s,errors\n";
  for (const auto& d : details) {
    out += fmt::format("{},{},{},{}", d.n_modes, d.id, num(d.alpha), num(d.best_fidelity));
    for (bool s : d.success) out += s ? ",1" : ",0";
    out += fmt::format(",{},{:.3f},{}\n", d.evals, d.wall_time_s, d.errors);
  }
  return out;
}

std::string runs_csv(const ExperimentPlan& plan, const std::vector<std::vector<PlannedInstance>>& instances,
                     const std::vector<RunSpec>& runs, const std::vector<RunRecord>& records) {
  std::string out = "N,instance,alpha,restart,seed,run,final_fidelity,best_cost,n_evals,wall_time_s,error\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const RunSpec& spec = runs[k];
    const RunRecord& rec = records[k];
    const Json& res = rec.body.at("result");
    const std::string cost = res.contains("best_cost") ? num(res.at("best_cost").get<double>()) : "";
    out += fmt::format("{},{},{},{},{},{},{},{},{},{:.3f},{}\n", plan.sizes[spec.size_index].n_modes(),
                       instances[spec.size_index][spec.instance_index].id, num(spec.config.alpha), spec.restart,
                       spec.config.seed, spec.hash, num(record_fidelity(rec)), cost,
                       res.at("n_evals").get<long>(), rec.wall_time_s, rec.error);
  }
  return out;
}

Json report_json(const ExperimentPlan& plan, const Aggregate& agg, const std::vector<RunSpec>& runs) {
  Json plan_json = to_json(plan);
  plan_json.erase("workers");
  Json rows = Json::array();
  for (const auto& r : agg.rows) {
    Json row;
    row["N"] = r.n_modes;
    row["alpha"] = r.alpha;
    row["threshold"] = r.threshold;
    row["success_fraction"] = r.success_fraction;
    row["n_instances"] = r.n_instances;
    rows.push_back(std::move(row));
  }
  Json details = Json::array();
  for (const auto& d : agg.details) {
    Json row;
    row["N"] = d.n_modes;
    row["instance"] = d.id;
    row["alpha"] = d.alpha;
    row["best_fidelity"] = d.best_fidelity;
    Json flags = Json::array();
    for (bool s : d.success) flags.push_back(s);
    row["success"] = std::move(flags);
    row["evals"] = d.evals;
    row["errors"] = d.errors;
    details.push_back(std::move(row));
  }
  Json hashes = Json::array();
  for (const auto& r : runs) hashes.push_back(r.hash);
  Json j;
  j["format_version"] = io::kFormatVersion;
  j["plan"] = std::move(plan_json);
  j["rows"] = std::move(rows);
  j["instances"] = std::move(details);
  j["runs"] = std::move(hashes);
  return j;
}

// Reads (or, when `create` is set, generates and solves) every instance of the plan.
std::vector<std::vector<PlannedInstance>> plan_instances(const ExperimentPlan& plan, const fs::path& dir, bool create) {
  std::vector<std::vector<PlannedInstance>> out;
  for (const SizeSpec& size : plan.sizes) {
    std::vector<PlannedInstance> row;
    for (int i = 0; i < plan.instances_per_size; ++i) {
      const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(i);
      PlannedInstance pi;
      pi.size = size;
      pi.file = dir / instance_file_name(size.n_modes(), seed);
      pi.id = pi.file.stem().string();
      if (create) {
        pi.instance = generate_instance(size.n_flights, size.n_gates, seed);
        io::write_json(pi.file, io::to_json(pi.instance));
      } else {
        pi.instance = io::read_instance(pi.file);
      }
      if (pi.instance.n_flights != size.n_flights || pi.instance.n_gates != size.n_gates) {
        throw InputError(fmt::format("instance '{}' does not match size {}", pi.file.string(), to_string(size)));
      }
      pi.hash = instance_hash(pi.instance);
      row.push_back(std::move(pi));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

SizeSpec default_factorization(int n_modes) {
  if (n_modes < 1) throw InputError(fmt::format("mode count must be positive, got {}", n_modes));
  int f = 1;
  for (int d = 1; d * d <= n_modes; ++d) {
    if (n_modes % d == 0) f = d;
  }
  return {f, n_modes / f};
}

SizeSpec parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used != text.size()) throw InputError("");
      return default_factorization(n);
    }
    const std::string a = text.substr(0, x);
    const std::string b = text.substr(x + 1);
    SizeSpec s;
    s.n_flights = std::stoi(a, &used);
    if (used != a.size()) throw InputError("");
    s.n_gates = std::stoi(b, &used);
    if (used != b.size()) throw InputError("");
    if (s.n_flights < 1 || s.n_gates < 1) throw InputError("");
    return s;
  } catch (const std::logic_error&) {
  } catch (const InputError&) {
  }
  throw InputError(fmt::format("bad size '{}': expected FxG or a mode count", text));
}

std::string to_string(const SizeSpec& size) { return fmt::format("{}x{}", size.n_flights, size.n_gates); }

void ExperimentPlan::validate() const {
  if (sizes.empty()) throw InputError("plan has no sizes");
  if (instances_per_size < 1 || restarts < 1) throw InputError("instances_per_size and restarts must be >= 1");
  if (alphas.empty() || thresholds.empty()) throw InputError("plan needs at least one alpha and one threshold");
  if (workers < 0) throw InputError("workers must be >= 0");
  if (!(run_timeout_s >= 0.0)) throw InputError("run_timeout_s must be >= 0");
  std::set<int> seen;
  for (const SizeSpec& s : sizes) {
    if (s.n_flights < 1 || s.n_gates < 1) throw InputError(fmt::format("bad size {}", to_string(s)));
    if (!seen.insert(s.n_modes()).second) {
      throw InputError(fmt::format("size N={} appears more than once", s.n_modes()));
    }
    if (s.n_modes() > kBruteForceCap) {
      throw CapacityError(fmt::format("size {} has {} modes, above the cap of {}", to_string(s), s.n_modes(),
                                      kBruteForceCap));
    }
    for (double a : alphas) {
      try {
        run_config(*this, a, 0).resolved(s.n_modes());
      } catch (const ContractViolation& e) {
        throw InputError(fmt::format("invalid training settings: {}", e.what()));
      }
    }
  }
}

ExperimentPlan default_plan() {
  ExperimentPlan plan;
  for (int n : {6, 8, 10, 12, 14, 16}) plan.sizes.push_back(default_factorization(n));
  return plan;
}

ExperimentPlan desk_plan() {
  ExperimentPlan plan;
  plan.sizes = {default_factorization(6), default_factorization(8)};
  plan.instances_per_size = 10;
  plan.restarts = 5;
  plan.alphas = {0.1, 1.0};
  return plan;
}

Json to_json(const ExperimentPlan& plan) {
  Json sizes = Json::array();
  for (const auto& s : plan.sizes) sizes.push_back(size_to_json(s));
  Json train = io::to_json(plan.train);
  train.erase("alpha");
  train.erase("thresholds");
  train.erase("time_budget_s");
  Json j;
  j["sizes"] = std::move(sizes);
  j["instances_per_size"] = plan.instances_per_size;
  j["restarts"] = plan.restarts;
  j["alphas"] = plan.alphas;
  j["thresholds"] = plan.thresholds;
  j["base_seed"] = plan.base_seed;
  j["workers"] = plan.workers;
  j["run_timeout_s"] = plan.run_timeout_s;
  j["train"] = std::move(train);
  return j;
}

ExperimentPlan plan_from_json(const Json& j, ExperimentPlan plan) {
  if (!j.is_object()) throw InputError("plan must be a JSON object");
  if (j.contains("sizes")) {
    if (!j.at("sizes").is_array()) throw InputError("plan field 'sizes' must be a list");
    plan.sizes.clear();
    for (const auto& s : j.at("sizes")) plan.sizes.push_back(size_from_json(s));
  }
  take(j, "instances_per_size", plan.instances_per_size);
  take(j, "restarts", plan.restarts);
  take(j, "alphas", plan.alphas);
  take(j, "thresholds", plan.thresholds);
  take(j, "base_seed", plan.base_seed);
  take(j, "workers", plan.workers);
  take(j, "run_timeout_s", plan.run_timeout_s);
  if (j.contains("train")) plan.train = io::train_config_from_json(j.at("train"), plan.train);
  return plan;
}

std::string instance_file_name(int n_modes, std::uint64_t seed) { return fmt::format("{}_{}.json", n_modes, seed); }

fs::path solution_path(const fs::path& instance_file) {
  fs::path p = instance_file;
  p.replace_extension(".solution.json");
  return p;
}

std::vector<fs::path> generate_instances(const std::vector<SizeSpec>& sizes, int count, std::uint64_t base_seed,
                                         const fs::path& dir) {
  if (count < 1) throw InputError("instance count must be >= 1");
  for (const SizeSpec& s : sizes) {
    if (s.n_modes() > kBruteForceCap) {
      throw CapacityError(fmt::format("size {} has {} modes, above the cap of {}", to_string(s), s.n_modes(),
                                      kBruteForceCap));
    }
  }
  std::vector<fs::path> written;
  for (const SizeSpec& s : sizes) {
    for (int i = 0; i < count; ++i) {
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
      const fs::path path = dir / instance_file_name(s.n_modes(), seed);
      io::write_json(path, io::to_json(generate_instance(s.n_flights, s.n_gates, seed)));
      written.push_back(path);
    }
  }
  return written;
}

GroundTruth solve_instance_file(const fs::path& instance_file) {
  const FgaInstance inst = io::read_instance(instance_file);
  const GroundTruth truth = brute_force_solve(assemble_qubo(inst));
  io::write_json(solution_path(instance_file), io::to_json(truth, inst.n_vars()));
  return truth;
}

Json RunRecord::to_json() const {
  Json j = body;
  Json meta;
  meta["wall_time_s"] = wall_time_s;
  meta["timestamp"] = timestamp;
  j["metadata"] = std::move(meta);
  return j;
}

RunRecord RunRecord::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("result") || !j.contains("error")) {
    throw InputError("run record is missing 'result' or 'error'");
  }
  RunRecord rec;
  rec.body = j;
  rec.body.erase("metadata");
  rec.error = j.at("error").get<std::string>();
  if (j.contains("metadata")) {
    const Json& meta = j.at("metadata");
    rec.wall_time_s = meta.value("wall_time_s", 0.0);
    rec.timestamp = meta.value("timestamp", std::string{});
  }
  return rec;
}

RunRecord run_training(const FgaInstance& inst, const GroundTruth& truth, const TrainConfig& config) {
  const TrainConfig cfg = config.resolved(inst.n_vars());
  const std::string ihash = instance_hash(inst);
  RunRecord rec;
  rec.body["format_version"] = io::kFormatVersion;
  rec.body["run_hash"] = run_hash(ihash, cfg);
  rec.body["instance"] = {{"n_flights", inst.n_flights}, {"n_gates", inst.n_gates}, {"seed", inst.seed},
                          {"hash", ihash}};
  rec.body["config"] = io::to_json(cfg);

  auto failure = [&](const std::string& tag, const std::vector<std::pair<int, double>>& trace) {
    rec.error = tag;
    Json t = Json::array();
    for (auto [i, c] : trace) t.push_back(Json::array({i, c}));
    Json res;
    res["final_fidelity"] = 0.0;
    res["success"] = std::vector<bool>(cfg.thresholds.size(), false);
    res["n_evals"] = static_cast<int>(trace.size());
    res["cost_trace"] = std::move(t);
    return res;
  };

  const auto start = std::chrono::steady_clock::now();
  Json result;
  try {
    result = io::to_json(train(assemble_qubo(inst), truth, cfg));
  } catch (const TimeoutError&) {
    result = failure("timeout", {});
  } catch (const TrainingFailedError& e) {
    result = failure("training-failed", e.trace());
  } catch (const InvalidStateError&) {
    result = failure("invalid-state", {});
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.timestamp = utc_timestamp();
  rec.body["error"] = rec.error;
  rec.body["result"] = std::move(result);
  return rec;
}

ExperimentSummary run_experiment(const ExperimentPlan& plan, const fs::path& out_dir, std::ostream* log) {
  plan.validate();
  const fs::path inst_dir = out_dir / "instances";
  const auto instances = plan_instances(plan, inst_dir, true);

  std::vector<std::vector<GroundTruth>> truths(instances.size());
  for (std::size_t s = 0; s < instances.size(); ++s) {
    for (const auto& pi : instances[s]) {
      GroundTruth gt = brute_force_solve(assemble_qubo(pi.instance));
      io::write_json(solution_path(pi.file), io::to_json(gt, pi.instance.n_vars()));
      truths[s].push_back(std::move(gt));
    }
  }

  const std::vector<RunSpec> runs = plan_runs(plan, instances);
  std::vector<std::optional<RunRecord>> records(runs.size());
  std::vector<std::size_t> todo;
  ExperimentSummary summary;
  summary.n_runs = static_cast<int>(runs.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    records[k] = load_run(run_path(out_dir, runs[k].hash), runs[k].hash);
    if (records[k]) {
      ++summary.n_reused;
    } else {
      todo.push_back(k);
    }
  }
  summary.n_executed = static_cast<int>(todo.size());

  int width = plan.workers > 0 ? plan.workers : static_cast<int>(std::thread::hardware_concurrency());
  width = std::clamp(width, 1, std::max<int>(1, static_cast<int>(todo.size())));

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < todo.size(); t = next++) {
      const std::size_t k = todo[t];
      const RunSpec& spec = runs[k];
      const PlannedInstance& pi = instances[spec.size_index][spec.instance_index];
      RunRecord rec = run_training(pi.instance, truths[spec.size_index][spec.instance_index], spec.config);
      io::write_json(run_path(out_dir, spec.hash), rec.to_json());
      const double fid = record_fidelity(rec);
      const int finished = ++done;
      if (log) {
        std::lock_guard lock(log_mutex);
        *log << fmt::format("[{}/{}] {} alpha={} restart={} fidelity={:.4f} {:.2f}s{}\n", finished, todo.size(),
                            pi.id, num(spec.config.alpha), spec.restart, fid, rec.wall_time_s,
                            rec.failed() ? " error=" + rec.error : "");
      }
      records[k] = std::move(rec);
    }
  };
  if (!todo.empty()) {
    std::vector<std::jthread> pool;
    for (int w = 0; w < width; ++w) pool.emplace_back(worker);
  }

  std::vector<RunRecord> done_records;
  done_records.reserve(records.size());
  for (auto& r : records) {
    if (r->failed()) ++summary.n_errors;
    done_records.push_back(std::move(*r));
  }

  const Aggregate agg = aggregate(plan, instances, done_records);
  io::write_text(out_dir / "report.csv", report_csv(agg.rows));
  io::write_text(out_dir / "instances.csv", instances_csv(plan, agg.details));
  io::write_text(out_dir / "runs.csv", runs_csv(plan, instances, runs, done_records));
  io::write_json(out_dir / "report.json", report_json(plan, agg, runs));
  summary.rows = agg.rows;
  return summary;
}

VerifyResult verify_experiment(const fs::path& out_dir) {
  VerifyResult result;
  const Json report = io::read_json(out_dir / "report.json");
  if (!report.contains("plan") || !report.contains("rows")) {
    result.problems.push_back("report.json lacks 'plan' or 'rows'");
    return result;
  }
  const ExperimentPlan plan = plan_from_json(report.at("plan"));
  const auto instances = plan_instances(plan, out_dir / "instances", false);
  const std::vector<RunSpec> runs = plan_runs(plan, instances);

  std::vector<RunRecord> records;
  for (const RunSpec& spec : runs) {
    auto rec = load_run(run_path(out_dir, spec.hash), spec.hash);
    if (!rec) {
      result.problems.push_back(fmt::format("run record {} is missing or unreadable", spec.hash));
      continue;
    }
    const Json& res = rec->body.at("result");
    const double fid = res.at("final_fidelity").get<double>();
    if (!(fid >= 0.0 && fid <= 1.0)) result.problems.push_back(fmt::format("run {} has fidelity {}", spec.hash, fid));
    if (!rec->failed() && res.contains("success")) {
      const auto flags = res.at("success").get<std::vector<bool>>();
      for (std::size_t t = 0; t < flags.size() && t < plan.thresholds.size(); ++t) {
        if (flags[t] != (fid > plan.thresholds[t])) {
          result.problems.push_back(fmt::format("run {} success flag {} disagrees with its fidelity", spec.hash, t));
        }
      }
    }
    records.push_back(std::move(*rec));
  }
  if (!result.ok()) return result;

  const Aggregate agg = aggregate(plan, instances, records);
  const Json expected = report_json(plan, agg, runs);
  if (io::dump(expected.at("rows")) != io::dump(report.at("rows"))) {
    result.problems.push_back("report.json rows differ from the recomputed success fractions");
  }
  if (io::dump(expected.at("instances")) != io::dump(report.at("instances"))) {
    result.problems.push_back("report.json instance rows differ from the run records");
  }
  std::ifstream csv(out_dir / "report.csv", std::ios::binary);
  std::stringstream text;
  text << csv.rdbuf();
  if (!csv || text.str() != report_csv(agg.rows)) {
    result.problems.push_back("report.csv differs from the recomputed success fractions");
  }
  return result;
}

}  // namespace gbs::harness
