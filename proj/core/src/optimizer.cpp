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
#include "snaprec/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace snaprec {

std::size_t Adam::add_block(std::size_t size) {
  state_.first_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(size)));
  state_.second_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(size)));
  return state_.first_moment.size() - 1;
}

void Adam::update(std::size_t block, std::span<double> param, std::span<const double> grad) {
  Vector& m = state_.first_moment.at(block);
  Vector& v = state_.second_moment.at(block);
  if (param.size() != static_cast<std::size_t>(m.size()) || grad.size() != param.size()) {
    throw std::invalid_argument("Adam::update: block shape mismatch");
  }
  if (state_.step == 0) throw std::logic_error("Adam::update before begin_step");
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(state_.step);
  const double lr_t = config_.learning_rate * std::sqrt(1.0 - std::pow(b2, t)) / (1.0 - std::pow(b1, t));
  for (std::size_t k = 0; k < param.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    m[i] = b1 * m[i] + (1.0 - b1) * grad[k];
    v[i] = b2 * v[i] + (1.0 - b2) * grad[k] * grad[k];
    param[k] -= lr_t * m[i] / (std::sqrt(v[i]) + config_.epsilon);
  }
}

}  // namespace snaprec
