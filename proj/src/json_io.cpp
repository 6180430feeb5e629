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

#include "gbs/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "gbs/errors.hpp"

namespace gbs::io {

namespace {

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void dump_to(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        dump_to(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
      if (j.empty() || flat) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          dump_to(j[k], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += inner;
        dump_to(j[k], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw InputError("cannot serialize a non-finite number");
      out += fmt::format("{}", v);
      return;
    }
    default:
      out += j.dump();
  }
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(fmt::format("missing field '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("field '{}': {}", key, e.what()));
  }
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw InputError(fmt::format("'{}' must have {} rows", what, n));
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
      throw InputError(fmt::format("'{}' row {} must have {} entries", what, r, n));
    }
    for (int c = 0; c < n; ++c) {
      if (!j[r][c].is_number()) throw InputError(fmt::format("'{}' entry ({}, {}) is not a number", what, r, c));
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

void check_version(const Json& j) {
  const int v = required<int>(j, "format_version");
  if (v != kFormatVersion) throw InputError(fmt::format("unsupported format_version {}", v));
}

}  // namespace

std::string dump(const Json& value) {
  std::string out;
  dump_to(value, out, 0);
  out += "\n";
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", tmp.string()));
    out << text;
    if (!out) throw InputError(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const Json& value) { write_text(path, dump(value)); }

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Json to_json(const FgaInstance& inst) {
  Json pairs = Json::array();
  for (auto [i, j] : inst.forbidden_pairs) pairs.push_back(Json::array({i, j}));
  Json j;
  j["n_flights"] = inst.n_flights;
  j["n_gates"] = inst.n_gates;
  j["transfer_matrix"] = matrix_to_json(inst.transfer);
  j["forbidden_pairs"] = std::move(pairs);
  j["lambda_one"] = inst.lambda_one;
  j["lambda_not"] = inst.lambda_not;
  j["seed"] = inst.seed;
  j["format_version"] = kFormatVersion;
  return j;
}

FgaInstance instance_from_json(const Json& j) {
  check_version(j);
  FgaInstance inst;
  inst.n_flights = required<int>(j, "n_flights");
  inst.n_gates = required<int>(j, "n_gates");
  if (inst.n_flights < 1 || inst.n_gates < 1) throw InputError("n_flights and n_gates must be positive");
  if (inst.n_vars() > kBruteForceCap) {
    throw CapacityError(fmt::format("instance with {} variables exceeds the cap of {}", inst.n_vars(), kBruteForceCap));
  }
  inst.transfer = matrix_from_json(required<Json>(j, "transfer_matrix"), inst.n_vars(), "transfer_matrix");
  for (const auto& p : required<Json>(j, "forbidden_pairs")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
      throw InputError("forbidden pairs must be [i, j] integer arrays");
    }
    inst.forbidden_pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  inst.lambda_one = required<double>(j, "lambda_one");
  inst.lambda_not = required<double>(j, "lambda_not");
  inst.seed = required<std::uint64_t>(j, "seed");
  try {
    inst.validate();
  } catch (const ContractViolation& e) {
    throw InputError(fmt::format("invalid instance: {}", e.what()));
  }
  return inst;
}

FgaInstance read_instance(const std::filesystem::path& path) { return instance_from_json(read_json(path)); }

Json to_json(const GroundTruth& truth, int n_vars) {
  Json mins = Json::array();
  for (std::uint32_t x : truth.minimizers) mins.push_back(ClickPattern{x, n_vars}.to_string());
  Json j;
  j["format_version"] = kFormatVersion;
  j["n_vars"] = n_vars;
  j["min_value"] = truth.min_value;
  j["minimizers"] = std::move(mins);
  return j;
}

GroundTruth ground_truth_from_json(const Json& j) {
  check_version(j);
  GroundTruth gt;
  gt.min_value = required<double>(j, "min_value");
  const int n = required<int>(j, "n_vars");
  for (const auto& s : required<Json>(j, "minimizers")) {
    if (!s.is_string()) throw InputError("minimizers must be bit strings");
    const ClickPattern p = ClickPattern::from_string(s.get<std::string>());
    if (p.n_modes != n) throw InputError("minimizer length does not match n_vars");
    gt.minimizers.push_back(p.bits);
  }
  if (gt.minimizers.empty()) throw InputError("ground truth lists no minimizers");
  return gt;
}

Json to_json(const TrainConfig& cfg) {
  Json j;
  j["alpha"] = cfg.alpha;
  j["shots_k"] = cfg.shots_k;
  j["mask_size"] = cfg.mask_size;
  j["max_evals"] = cfg.max_evals;
  j["optimizer"] = to_string(cfg.optimizer);
  j["mask_rule"] = to_string(cfg.mask_rule);
  j["adam_lr"] = cfg.adam_lr;
  j["adam_steps"] = cfg.adam_steps;
  j["init_scale"] = cfg.init_scale;
  j["rho_end"] = cfg.rho_end;
  j["seed"] = cfg.seed;
  j["thresholds"] = cfg.thresholds;
  j["enumeration_cap"] = cfg.enumeration_cap;
  j["time_budget_s"] = cfg.time_budget_s;
  return j;
}

TrainConfig train_config_from_json(const Json& j, TrainConfig cfg) {
  if (!j.is_object()) throw InputError("train config must be a JSON object");
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = required<std::decay_t<decltype(field)>>(j, key);
  };
  take("alpha", cfg.alpha);
  take("shots_k", cfg.shots_k);
  take("mask_size", cfg.mask_size);
  take("max_evals", cfg.max_evals);
  if (j.contains("optimizer")) cfg.optimizer = optimizer_from_string(required<std::string>(j, "optimizer"));
  if (j.contains("mask_rule")) cfg.mask_rule = mask_rule_from_string(required<std::string>(j, "mask_rule"));
  take("adam_lr", cfg.adam_lr);
  take("adam_steps", cfg.adam_steps);
  take("init_scale", cfg.init_scale);
  take("rho_end", cfg.rho_end);
  take("seed", cfg.seed);
  take("thresholds", cfg.thresholds);
  take("enumeration_cap", cfg.enumeration_cap);
  take("time_budget_s", cfg.time_budget_s);
  return cfg;
}

Json to_json(const TrainRecord& record) {
  Json mask = Json::array();
  for (auto [i, j] : record.mask.indices) mask.push_back(Json::array({i, j}));
  Json trace = Json::array();
  for (auto [i, c] : record.cost_trace) trace.push_back(Json::array({i, c}));
  Json success = Json::array();
  for (bool s : record.success) success.push_back(s);

  Json j;
  j["n_modes"] = record.best_theta.n_modes();
  j["mask"] = std::move(mask);
  j["best_theta"] = matrix_to_json(record.best_theta.entries());
  j["best_cost"] = record.best_cost;
  j["n_evals"] = record.n_evals;
  j["final_fidelity"] = record.final_fidelity;
  j["thresholds"] = record.thresholds;
  j["success"] = std::move(success);
  j["cost_trace"] = std::move(trace);
  return j;
}

}  // namespace gbs::io
