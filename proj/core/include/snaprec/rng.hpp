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
#include <random>
#include <string_view>

namespace snaprec {

using Rng = std::mt19937_64;

// Derives independent, reproducible generators from one run seed. Each
// consumer asks for a named stream ("init", "negatives", "prompt-sampling",
// "random-gate", ...) so that turning a component off leaves the draws of
// every other component unchanged.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // `index` separates repeated uses of one stream, e.g. one per snapshot.
  Rng stream(std::string_view name, std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace snaprec
