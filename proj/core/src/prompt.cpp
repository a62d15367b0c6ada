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
#include "snaprec/prompt.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "snaprec/optimizer.hpp"
#include "snaprec/propagation.hpp"

namespace snaprec {
namespace {

constexpr double kLossTolerance = 1e-4;

// Shared epoch loop for both fine-tuning variants. `step` runs one
// mini-batch and returns its summed loss.
template <typename Step>
void run_epochs(const InteractionGraph& graph, const TrainConfig& train, Rng& rng,
                FinetuneResult& result, Step&& step) {
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= train.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t count = 0;
    for (const auto& batch : make_batches(graph, train.batch_size, rng)) {
      const auto triples = sample_negatives(graph, batch, rng);
      loss_sum += step(triples);
      count += triples.size();
    }
    const EpochRecord rec{epoch, count ? loss_sum / static_cast<double>(count) : 0.0, -1.0};
    result.log.push_back(rec);
    result.epochs = epoch;
    if (rec.mean_loss < best * (1.0 - kLossTolerance)) {
      best = rec.mean_loss;
      since_best = 0;
    } else if (++since_best >= train.patience) {
      break;
    }
  }
}

}  // namespace

std::vector<double> sampling_decay(std::size_t n, double phi) {
  std::vector<double> decay(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k + 1);
    double v = 1.0;
    if (phi > 0) {
      v = 1.0 - (i - 1.0) * phi;
    } else if (phi < 0) {
      v = 1.0 + (static_cast<double>(n) - i) * phi;
    }
    decay[k] = std::clamp(v, 0.0, 1.0);
  }
  return decay;
}

PromptGraph build_prompt_graph(std::span<const Interaction> pretrain_edges,
                               std::span<const std::vector<Interaction>> snapshots,
                               std::int64_t n_users, std::int64_t n_items, double phi,
                               double tau_seconds, Rng& rng) {
  PromptGraph out;
  out.decay = sampling_decay(snapshots.size(), phi);
  std::vector<Interaction> edges(pretrain_edges.begin(), pretrain_edges.end());
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const auto& snap = snapshots[k];
    const auto keep = static_cast<std::size_t>(
        std::lround(out.decay[k] * static_cast<double>(snap.size())));
    std::sample(snap.begin(), snap.end(), std::back_inserter(edges), keep, rng);
    out.retained.push_back(keep);
  }
  out.graph = InteractionGraph::build(edges, n_users, n_items, tau_seconds);
  return out;
}

EmbeddingTable random_gate(const EmbeddingTable& x, double stddev, Rng& rng) {
  const GateParams gate = GateParams::gaussian(x.cols(), stddev, rng, /*learnable=*/false);
  return apply_gate(x, gate);
}

EmbeddingTable prompt_forward(const EmbeddingTable& x_gated, const InteractionGraph& prompt,
                              const ModelConfig& model) {
  PropagationWeights w = make_weights(prompt, model.temporal);
  w.threads = model.threads;
  return forward(w, x_gated, model.layers);
}

EmbeddingTable adaptive_gate(const EmbeddingTable& x, const GateParams& gate) {
  if (!gate.learnable) throw std::invalid_argument("adaptive_gate: gate is not learnable");
  return apply_gate(x, gate);
}

FinetuneResult finetune(const InteractionGraph& graph, const EmbeddingTable& x_n0,
                        const ModelConfig& model, const TrainConfig& train, Rng& rng) {
  if (graph.n_edges() == 0) throw std::invalid_argument("finetune: empty snapshot");
  PropagationWeights w = make_weights(graph, model.temporal);
  w.threads = model.threads;

  FinetuneResult result;
  result.gate = GateParams::zeros(x_n0.cols(), /*learnable=*/true);
  result.trainable_parameters = result.gate.parameter_count();
  Adam adam({.learning_rate = train.learning_rate});
  const std::size_t w_block = adam.add_block(static_cast<std::size_t>(result.gate.weight.size()));
  const std::size_t b_block = adam.add_block(static_cast<std::size_t>(result.gate.bias.size()));

  run_epochs(graph, train, rng, result, [&](std::span<const BprTriple> triples) {
    const auto grads = bpr_gradients(w, x_n0, result.gate, triples, model.layers);
    adam.begin_step();
    adam.update(w_block, result.gate.weight, grads.gate.weight);
    adam.update(b_block, result.gate.bias, grads.gate.bias);
    return grads.loss;
  });
  result.output = forward(w, adaptive_gate(x_n0, result.gate), model.layers);
  result.optimizer = adam.state();
  return result;
}

FinetuneResult finetune_embeddings(const InteractionGraph& graph, const EmbeddingTable& x_n0,
                                   const ModelConfig& model, const TrainConfig& train, Rng& rng) {
  if (graph.n_edges() == 0) throw std::invalid_argument("finetune: empty snapshot");
  PropagationWeights w = make_weights(graph, model.temporal);
  w.threads = model.threads;

  FinetuneResult result;
  EmbeddingTable x = x_n0;
  result.trainable_parameters = static_cast<std::size_t>(x.size());
  Adam adam({.learning_rate = train.learning_rate});
  const std::size_t block = adam.add_block(static_cast<std::size_t>(x.size()));

  run_epochs(graph, train, rng, result, [&](std::span<const BprTriple> triples) {
    const auto grads = bpr_gradients(w, x, triples, model.layers, train.l2_reg);
    adam.begin_step();
    adam.update(block, x, grads.x0);
    return grads.loss;
  });
  result.output = forward(w, x, model.layers);
  result.optimizer = adam.state();
  return result;
}

}  // namespace snaprec
