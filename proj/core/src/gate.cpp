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
#include "snaprec/gate.hpp"

#include <random>
#include <stdexcept>

namespace snaprec {
namespace {

Matrix gate_activation(const Matrix& x, const GateParams& gate) {
  if (x.cols() != gate.dim() || gate.weight.rows() != gate.dim() ||
      gate.weight.cols() != gate.dim()) {
    throw std::invalid_argument("gate: dimension mismatch");
  }
  Matrix z = x * gate.weight.transpose();
  z.rowwise() += gate.bias.transpose();
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

GateParams GateParams::zeros(Eigen::Index dim, bool learnable) {
  return {Matrix::Zero(dim, dim), Vector::Zero(dim), learnable};
}

GateParams GateParams::gaussian(Eigen::Index dim, double stddev, Rng& rng, bool learnable) {
  std::normal_distribution<double> normal(0.0, stddev);
  GateParams g = zeros(dim, learnable);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) g.weight(r, c) = normal(rng);
  }
  for (Eigen::Index c = 0; c < dim; ++c) g.bias[c] = normal(rng);
  return g;
}

Matrix apply_gate(const Matrix& x, const GateParams& gate) {
  return x.cwiseProduct(gate_activation(x, gate));
}

GateGradients gate_backward(const Matrix& x, const GateParams& gate, const Matrix& grad_out) {
  const Matrix s = gate_activation(x, gate);
  // d out / d z = x ⊙ s ⊙ (1 - s)
  const Matrix dz =
      grad_out.cwiseProduct(x).cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
  return {dz.transpose() * x, dz.colwise().sum().transpose()};
}

}  // namespace snaprec
