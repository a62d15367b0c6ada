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
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "snaprec/gate.hpp"
#include "snaprec/graph.hpp"
#include "snaprec/optimizer.hpp"
#include "snaprec/propagation.hpp"
#include "snaprec/rng.hpp"
#include "snaprec/types.hpp"

namespace snaprec {

// (user, observed item, sampled negative) as global node ids.
struct BprTriple {
  NodeId user = 0;
  NodeId pos = 0;
  NodeId neg = 0;
};

using Positive = std::pair<NodeId, NodeId>;

struct ModelConfig {
  int dim = 64;
  int layers = 3;
  bool temporal = true;
  int threads = 1;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 2048;
  int max_epochs = 100;
  double l2_reg = 1e-4;
  int patience = 10;
  double init_std = 0.1;
  double validation_fraction = 0.05;
  std::size_t eval_k = 20;
};

// Uniform negatives by rejection over the items the user has no edge to in
// `graph`. Throws DegenerateDataError for a user connected to every item.
std::vector<BprTriple> sample_negatives(const InteractionGraph& graph,
                                        std::span<const Positive> positives, Rng& rng);

// -sum log sigmoid(x_u.x_i - x_u.x_j) over the triples.
double bpr_loss(const Matrix& x_final, std::span<const BprTriple> triples);

// l2 * sum over triples of |x0_u|^2 + |x0_i|^2 + |x0_j|^2.
double l2_penalty(const Matrix& x0, std::span<const BprTriple> triples, double l2);

// dL/dx_final of the unregularized loss.
Matrix bpr_grad_final(const Matrix& x_final, std::span<const BprTriple> triples);

struct EmbeddingGradients {
  double loss = 0.0;  // including the l2 term
  Matrix x0;
};

// Loss and gradient w.r.t. the layer-0 table for forward(w, x0, layers).
EmbeddingGradients bpr_gradients(const PropagationWeights& w, const Matrix& x0,
                                 std::span<const BprTriple> triples, int layers, double l2);

struct GatedGradients {
  double loss = 0.0;
  GateGradients gate;
};

// Loss and gate gradients for forward(w, apply_gate(x_in, gate), layers).
// x_in is truncated: it is a constant of this computation.
GatedGradients bpr_gradients(const PropagationWeights& w, const Matrix& x_in,
                             const GateParams& gate, std::span<const BprTriple> triples,
                             int layers);

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double validation_recall = -1.0;  // -1 when no validation split exists
};

struct PretrainResult {
  EmbeddingTable embeddings;  // layer-0 table at the best validation epoch
  std::vector<EpochRecord> log;
  int best_epoch = 0;
  OptimizerState optimizer;
};

// Holds out max(1, round(fraction * deg)) edges of every user with at least 2
// edges. Returns (train, validation).
std::pair<std::vector<Interaction>, std::vector<Interaction>> split_validation(
    const InteractionGraph& graph, double fraction, Rng& rng);

EmbeddingTable init_embeddings(std::int64_t n_nodes, int dim, double stddev, Rng& rng);

using EpochCallback = std::function<void(const EpochRecord&)>;

// BPR pre-training of the layer-0 table with early stopping on validation
// Recall@k. Draws from the "split", "init", "shuffle" and "negatives" streams.
PretrainResult pretrain(const InteractionGraph& graph, const ModelConfig& model,
                        const TrainConfig& train, const RngStreams& streams,
                        const EpochCallback& on_epoch = {});

// One epoch worth of shuffled mini-batches of the graph's edges.
std::vector<std::vector<Positive>> make_batches(const InteractionGraph& graph,
                                                std::size_t batch_size, Rng& rng);

}  // namespace snaprec
