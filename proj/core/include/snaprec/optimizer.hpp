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
#include <span>
#include <vector>

#include "snaprec/types.hpp"

namespace snaprec {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  std::int64_t step = 0;
  std::vector<Vector> first_moment;   // one per parameter block
  std::vector<Vector> second_moment;
};

// Adam over a fixed list of flat parameter blocks (an embedding table, a
// gate matrix, a bias vector, ...). Each block's shape is fixed at
// registration.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  std::size_t add_block(std::size_t size);

  // Advances the shared step counter; call once per optimizer step, before
  // the update() calls of that step.
  void begin_step() { ++state_.step; }

  void update(std::size_t block, std::span<double> param, std::span<const double> grad);

  template <typename Dense>
  void update(std::size_t block, Dense& param, const Dense& grad) {
    update(block, std::span<double>(param.data(), static_cast<std::size_t>(param.size())),
           std::span<const double>(grad.data(), static_cast<std::size_t>(grad.size())));
  }

  const OptimizerState& state() const { return state_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  OptimizerState state_;
};

}  // namespace snaprec
