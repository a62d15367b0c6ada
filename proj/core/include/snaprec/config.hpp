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
#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "snaprec/eval.hpp"
#include "snaprec/trainer.hpp"

namespace snaprec {

// Every knob of an experiment. The text form is flat `key = value` lines;
// see kConfigKeys in config.cpp for the full list with defaults.
struct RunConfig {
  // model
  int dim = 64;
  int layers = 3;

  // time
  double tau_hours = 24.0;
  double pretrain_span_hours = 120.0;
  double granularity_hours = 24.0;

  // dynamics / prompt
  int omega = 2;
  double phi = 0.1;
  double random_gate_std = 0.05;

  // evaluation
  int k = 20;
  std::size_t eval_candidates = 0;

  // pre-training
  double learning_rate = 1e-3;
  std::size_t batch_size = 2048;
  int max_epochs = 100;
  int patience = 10;
  double l2_reg = 1e-4;
  double init_std = 0.1;
  double validation_fraction = 0.05;

  // fine-tuning
  double finetune_learning_rate = 1e-2;
  std::size_t finetune_batch_size = 2048;
  int finetune_epochs = 30;
  int finetune_patience = 5;

  // run
  std::uint64_t seed = 2024;
  bool deterministic = true;
  int threads = 1;

  // ablations
  bool no_temporal = false;       // classic symmetric propagation weights
  bool no_prompt_tuning = false;  // fine-tune straight from the initial table
  bool no_gate = false;           // fine-tune the table instead of the gate
  bool no_interp_update = false;  // always start from the pre-trained table
  bool no_finetune = false;       // evaluate the frozen pre-trained model

  double tau_seconds() const { return tau_hours * 3600.0; }
  std::int64_t pretrain_span_seconds() const;
  std::int64_t granularity_seconds() const;

  ModelConfig model() const;
  TrainConfig pretrain_config() const;
  TrainConfig finetune_config() const;
  EvalOptions eval_options() const;

  // Throws ConfigError if any value is out of range.
  void validate() const;
};

// Parses `key = value` lines (`#` starts a comment). Missing keys keep their
// defaults; unknown keys, malformed values and out-of-range values throw
// ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(std::string_view text);

// Applies one `key=value` override in place.
void apply_override(RunConfig& config, std::string_view assignment);

// Canonical text form: every key in a fixed order. parse_config(to_text(c))
// reproduces c.
std::string to_text(const RunConfig& config);

std::vector<std::string> config_keys();

}  // namespace snaprec
