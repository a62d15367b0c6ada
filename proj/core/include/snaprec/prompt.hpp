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

#include "snaprec/gate.hpp"
#include "snaprec/graph.hpp"
#include "snaprec/rng.hpp"
#include "snaprec/trainer.hpp"
#include "snaprec/types.hpp"

namespace snaprec {

// Retention fraction per snapshot i = 1..n, clamped to [0,1]:
//   phi > 0:  1 - (i-1) phi   (older snapshots kept more)
//   phi < 0:  1 + (n-i) phi   (recent snapshots kept more)
//   phi = 0:  1               (keep everything)
std::vector<double> sampling_decay(std::size_t n, double phi);

struct PromptGraph {
  InteractionGraph graph;
  std::vector<double> decay;          // per snapshot
  std::vector<std::size_t> retained;  // edges kept per snapshot
};

// All pre-training edges plus round(decay_i * |E_i|) edges of each snapshot,
// drawn uniformly without replacement. Temporal attributes are recomputed
// over the combined edge set.
PromptGraph build_prompt_graph(std::span<const Interaction> pretrain_edges,
                               std::span<const std::vector<Interaction>> snapshots,
                               std::int64_t n_users, std::int64_t n_items, double phi,
                               double tau_seconds, Rng& rng);

// Applies a freshly drawn, non-learnable N(0, stddev) gate and discards it.
EmbeddingTable random_gate(const EmbeddingTable& x, double stddev, Rng& rng);

// The single non-training forward pass over the prompt graph.
EmbeddingTable prompt_forward(const EmbeddingTable& x_gated, const InteractionGraph& prompt,
                              const ModelConfig& model);

// Learnable gate applied to the truncated prompt output.
EmbeddingTable adaptive_gate(const EmbeddingTable& x, const GateParams& gate);

struct FinetuneResult {
  GateParams gate;
  EmbeddingTable output;  // forward(gate(x_n0); G_n) after the last epoch
  std::vector<EpochRecord> log;
  int epochs = 0;
  std::size_t trainable_parameters = 0;
  OptimizerState optimizer;
};

// Trains only the adaptive gate (d^2 + d scalars) with BPR over `graph`.
// `x_n0` is read-only. Stops after train.max_epochs epochs, or earlier once
// the epoch-mean loss has not improved for train.patience epochs.
FinetuneResult finetune(const InteractionGraph& graph, const EmbeddingTable& x_n0,
                        const ModelConfig& model, const TrainConfig& train, Rng& rng);

// Gate-free variant: trains a copy of x_n0 directly (the "no gate" ablation).
FinetuneResult finetune_embeddings(const InteractionGraph& graph, const EmbeddingTable& x_n0,
                                   const ModelConfig& model, const TrainConfig& train, Rng& rng);

}  // namespace snaprec
