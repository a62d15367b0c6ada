// Copyright 2026 The snaprec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "snaprec/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <type_traits>

namespace snaprec {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  const auto fail = [&]() -> ConfigError {
    return ConfigError("bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
  };
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw fail();
  } else {
    if constexpr (std::is_unsigned_v<T>) {
      if (!text.empty() && text.front() == '-') throw fail();
    }
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw fail();
    return value;
  }
}

template <typename T>
std::string format_value(T value) {
  if constexpr (std::is_same_v<T, bool>) {
    return value ? "true" : "false";
  } else {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
  }
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key entry(const char* name, T RunConfig::*field) {
  return {name,
          [name, field](RunConfig& c, std::string_view v) { c.*field = parse_value<T>(name, v); },
          [field](const RunConfig& c) { return format_value(c.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      entry("dim", &RunConfig::dim),
      entry("layers", &RunConfig::layers),
      entry("tau_hours", &RunConfig::tau_hours),
      entry("pretrain_span_hours", &RunConfig::pretrain_span_hours),
      entry("granularity_hours", &RunConfig::granularity_hours),
      entry("omega", &RunConfig::omega),
      entry("phi", &RunConfig::phi),
      entry("random_gate_std", &RunConfig::random_gate_std),
      entry("k", &RunConfig::k),
      entry("eval_candidates", &RunConfig::eval_candidates),
      entry("learning_rate", &RunConfig::learning_rate),
      entry("batch_size", &RunConfig::batch_size),
      entry("max_epochs", &RunConfig::max_epochs),
      entry("patience", &RunConfig::patience),
      entry("l2_reg", &RunConfig::l2_reg),
      entry("init_std", &RunConfig::init_std),
      entry("validation_fraction", &RunConfig::validation_fraction),
      entry("finetune_learning_rate", &RunConfig::finetune_learning_rate),
      entry("finetune_batch_size", &RunConfig::finetune_batch_size),
      entry("finetune_epochs", &RunConfig::finetune_epochs),
      entry("finetune_patience", &RunConfig::finetune_patience),
      entry("seed", &RunConfig::seed),
      entry("deterministic", &RunConfig::deterministic),
      entry("threads", &RunConfig::threads),
      entry("no_temporal", &RunConfig::no_temporal),
      entry("no_prompt_tuning", &RunConfig::no_prompt_tuning),
      entry("no_gate", &RunConfig::no_gate),
      entry("no_interp_update", &RunConfig::no_interp_update),
      entry("no_finetune", &RunConfig::no_finetune),
  };
  return k;
}

void set_key(RunConfig& c, std::string_view key, std::string_view value) {
  for (const auto& k : keys()) {
    if (key == k.name) {
      k.set(c, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("out of range: " + what);
}

}  // namespace

std::int64_t RunConfig::pretrain_span_seconds() const {
  return std::llround(pretrain_span_hours * 3600.0);
}

std::int64_t RunConfig::granularity_seconds() const {
  return std::llround(granularity_hours * 3600.0);
}

ModelConfig RunConfig::model() const {
  return {.dim = dim, .layers = layers, .temporal = !no_temporal, .threads = threads};
}

TrainConfig RunConfig::pretrain_config() const {
  return {.learning_rate = learning_rate,
          .batch_size = batch_size,
          .max_epochs = max_epochs,
          .l2_reg = l2_reg,
          .patience = patience,
          .init_std = init_std,
          .validation_fraction = validation_fraction,
          .eval_k = static_cast<std::size_t>(k)};
}

TrainConfig RunConfig::finetune_config() const {
  TrainConfig t = pretrain_config();
  t.learning_rate = finetune_learning_rate;
  t.batch_size = finetune_batch_size;
  t.max_epochs = finetune_epochs;
  t.patience = finetune_patience;
  return t;
}

EvalOptions RunConfig::eval_options() const {
  return {.k = static_cast<std::size_t>(k),
          .threads = threads,
          .sampled_candidates = eval_candidates,
          .seed = seed};
}

void RunConfig::validate() const {
  require(dim >= 1, "dim >= 1");
  require(layers >= 0, "layers >= 0");
  require(tau_hours > 0, "tau_hours > 0");
  require(pretrain_span_seconds() > 0, "pretrain_span_hours > 0");
  require(granularity_seconds() > 0, "granularity_hours > 0");
  require(omega >= 1, "omega >= 1");
  require(phi >= -1.0 && phi <= 1.0, "phi in [-1, 1]");
  require(random_gate_std >= 0, "random_gate_std >= 0");
  require(k >= 1, "k >= 1");
  require(learning_rate > 0 && finetune_learning_rate > 0, "learning rates > 0");
  require(batch_size >= 1 && finetune_batch_size >= 1, "batch sizes >= 1");
  require(max_epochs >= 0 && finetune_epochs >= 0, "epoch counts >= 0");
  require(patience >= 1 && finetune_patience >= 1, "patience >= 1");
  require(l2_reg >= 0, "l2_reg >= 0");
  require(init_std > 0, "init_std > 0");
  require(validation_fraction >= 0 && validation_fraction < 1, "validation_fraction in [0, 1)");
  require(threads >= 1, "threads >= 1");
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v(line);
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    set_key(c, trim(v.substr(0, eq)), trim(v.substr(eq + 1)));
  }
  c.validate();
  return c;
}

RunConfig parse_config_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  config.validate();
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.emplace_back(k.name);
  return out;
}

}  // namespace snaprec
