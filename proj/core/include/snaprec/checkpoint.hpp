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
#include <filesystem>

#include "snaprec/gate.hpp"
#include "snaprec/types.hpp"

namespace snaprec {

// Binary layout (little-endian):
//   char[8]  magic "SNAPREC1"
//   u32      kind (1 = embedding table, 2 = gate)
//   u32      reserved, 0
//   i64      dim, n_users, n_items, optimizer_step
//   f64[]    embedding rows (n_users + n_items) x dim, row-major;
//            for a gate: weight dim x dim row-major, then bias[dim]
struct EmbeddingCheckpoint {
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;
  std::int64_t optimizer_step = 0;
  EmbeddingTable table;
};

struct GateCheckpoint {
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;
  std::int64_t optimizer_step = 0;
  GateParams gate;
};

void write_checkpoint(const std::filesystem::path& path, const EmbeddingCheckpoint& ckpt);
EmbeddingCheckpoint read_embedding_checkpoint(const std::filesystem::path& path);

void write_checkpoint(const std::filesystem::path& path, const GateCheckpoint& ckpt);
GateCheckpoint read_gate_checkpoint(const std::filesystem::path& path);

}  // namespace snaprec
