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
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snaprec/config.hpp"
#include "snaprec/eval.hpp"
#include "snaprec/graph.hpp"
#include "snaprec/prompt.hpp"
#include "snaprec/trainer.hpp"
#include "snaprec/types.hpp"

namespace snaprec {

// The last (up to) omega fine-tuned tables, newest first.
class WindowBuffer {
 public:
  explicit WindowBuffer(std::size_t capacity);

  // `snapshot` must be larger than that of the newest entry.
  void push(std::size_t snapshot, EmbeddingTable table);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }

  // i = 0 is the most recent table.
  const EmbeddingTable& table(std::size_t i) const { return entries_.at(i).table; }
  std::size_t snapshot(std::size_t i) const { return entries_.at(i).snapshot; }

 private:
  struct Entry {
    std::size_t snapshot;
    EmbeddingTable table;
  };
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

// mean(x_p, sum_i i * X_{n-i} / sum_k k) over the buffered tables, where
// i = 1 is the newest table and so carries the least weight. Returns x_p
// for an empty buffer.
EmbeddingTable interpolative_init(const EmbeddingTable& x_p, const WindowBuffer& buffer);

struct SnapshotRecord {
  std::size_t snapshot = 0;  // 1-based index of the fine-tuning snapshot; tested on the next
  bool evaluated = false;
  std::string note;          // why a step was skipped
  MetricsReport metrics;
  int epochs = 0;
  double wall_time = 0.0;    // seconds
  std::size_t train_edges = 0;
  std::size_t test_edges = 0;
  std::size_t prompt_edges = 0;
};

struct DynamicSummary {
  std::size_t evaluated = 0;
  double macro_recall = 0.0;  // uniform over evaluated snapshots
  double macro_ndcg = 0.0;
  double micro_recall = 0.0;  // weighted by evaluated users per snapshot
  double micro_ndcg = 0.0;
};

struct DynamicReport {
  std::vector<SnapshotRecord> records;
  DynamicSummary summary;
  PretrainResult pretrain;
  EmbeddingTable last;  // the most recent fine-tuned table (x_p if none)
  std::size_t buffer_size = 0;
};

struct DynamicHooks {
  std::function<void(const EpochRecord&)> on_pretrain_epoch;
  std::function<void(const SnapshotRecord&)> on_snapshot;
};

// Pre-trains on G_p (unless `pretrained` is given), then for each snapshot n
// but the last: interpolated init, prompt graph over snapshots 1..n, random
// gate and prompt forward, fine-tuning on G_n, evaluation on G_{n+1}.
// One fine-tuning step on snapshot `t` (0-based), starting from `x_init`.
// Shares RNG streams with run_dynamic, so the results are identical.
struct StepOutput {
  EmbeddingTable x_n0;
  FinetuneResult tuned;
  std::size_t prompt_edges = 0;
};

StepOutput finetune_step(const SnapshotSeries& series, const RunConfig& config,
                         const EmbeddingTable& x_init, std::size_t t);

DynamicReport run_dynamic(const SnapshotSeries& series, const RunConfig& config,
                          const std::optional<EmbeddingTable>& pretrained = std::nullopt,
                          const DynamicHooks& hooks = {});

DynamicSummary summarize(const std::vector<SnapshotRecord>& records);

}  // namespace snaprec
