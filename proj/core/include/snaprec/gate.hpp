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

#include <cmath>

#include "snaprec/rng.hpp"
#include "snaprec/types.hpp"

namespace snaprec {

// Row-wise sigmoid gate: out_r = x_r ⊙ sigmoid(W x_r + b).
struct GateParams {
  Matrix weight;  // d x d
  Vector bias;    // d
  bool learnable = false;

  static GateParams zeros(Eigen::Index dim, bool learnable);
  static GateParams gaussian(Eigen::Index dim, double stddev, Rng& rng, bool learnable);

  Eigen::Index dim() const { return bias.size(); }
  std::size_t parameter_count() const {
    return static_cast<std::size_t>(weight.size() + bias.size());
  }
};

Matrix apply_gate(const Matrix& x, const GateParams& gate);

struct GateGradients {
  Matrix weight;
  Vector bias;
};

// Gradients w.r.t. W and b given dL/d(out). The input is treated as a
// constant, so no gradient flows back into x.
GateGradients gate_backward(const Matrix& x, const GateParams& gate, const Matrix& grad_out);

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace snaprec
