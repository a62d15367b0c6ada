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
#include "snaprec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "snaprec/eval.hpp"

namespace snaprec {
namespace {

// -log sigmoid(x), stable for large |x|.
double neg_log_sigmoid(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

}  // namespace

std::vector<BprTriple> sample_negatives(const InteractionGraph& graph,
                                        std::span<const Positive> positives, Rng& rng) {
  std::uniform_int_distribution<std::int64_t> pick(0, std::max<std::int64_t>(graph.n_items() - 1, 0));
  std::vector<BprTriple> out;
  out.reserve(positives.size());
  for (const auto& [u, i] : positives) {
    if (graph.degree(u) >= graph.n_items()) {
      throw DegenerateDataError("user " + std::to_string(u) +
                                " has interacted with every item; no negative exists");
    }
    NodeId j;
    do {
      j = graph.n_users() + pick(rng);
    } while (graph.has_edge(u, j));
    out.push_back({u, i, j});
  }
  return out;
}

double bpr_loss(const Matrix& x_final, std::span<const BprTriple> triples) {
  double loss = 0.0;
  for (const auto& t : triples) {
    const auto xu = x_final.row(t.user);
    loss += neg_log_sigmoid(xu.dot(x_final.row(t.pos)) - xu.dot(x_final.row(t.neg)));
  }
  return loss;
}

double l2_penalty(const Matrix& x0, std::span<const BprTriple> triples, double l2) {
  double sum = 0.0;
  for (const auto& t : triples) {
    sum += x0.row(t.user).squaredNorm() + x0.row(t.pos).squaredNorm() + x0.row(t.neg).squaredNorm();
  }
  return l2 * sum;
}

Matrix bpr_grad_final(const Matrix& x_final, std::span<const BprTriple> triples) {
  Matrix g = Matrix::Zero(x_final.rows(), x_final.cols());
  for (const auto& t : triples) {
    const auto xu = x_final.row(t.user);
    const auto xi = x_final.row(t.pos);
    const auto xj = x_final.row(t.neg);
    // d/dx [-log sigmoid(x)] = -sigmoid(-x)
    const double c = sigmoid(xu.dot(xj) - xu.dot(xi));
    g.row(t.user) += c * (xj - xi);
    g.row(t.pos) -= c * xu;
    g.row(t.neg) += c * xu;
  }
  return g;
}

EmbeddingGradients bpr_gradients(const PropagationWeights& w, const Matrix& x0,
                                 std::span<const BprTriple> triples, int layers, double l2) {
  const Matrix final_x = forward(w, x0, layers);
  EmbeddingGradients out;
  out.loss = bpr_loss(final_x, triples) + l2_penalty(x0, triples, l2);
  out.x0 = forward_backward(w, bpr_grad_final(final_x, triples), layers);
  if (l2 != 0.0) {
    for (const auto& t : triples) {
      out.x0.row(t.user) += 2.0 * l2 * x0.row(t.user);
      out.x0.row(t.pos) += 2.0 * l2 * x0.row(t.pos);
      out.x0.row(t.neg) += 2.0 * l2 * x0.row(t.neg);
    }
  }
  return out;
}

GatedGradients bpr_gradients(const PropagationWeights& w, const Matrix& x_in,
                             const GateParams& gate, std::span<const BprTriple> triples,
                             int layers) {
  const Matrix gated = apply_gate(x_in, gate);
  const Matrix final_x = forward(w, gated, layers);
  GatedGradients out;
  out.loss = bpr_loss(final_x, triples);
  const Matrix g_gated = forward_backward(w, bpr_grad_final(final_x, triples), layers);
  out.gate = gate_backward(x_in, gate, g_gated);
  return out;
}

std::pair<std::vector<Interaction>, std::vector<Interaction>> split_validation(
    const InteractionGraph& graph, double fraction, Rng& rng) {
  std::vector<Interaction> train, validation;
  const auto edges = graph.interactions();
  std::vector<char> held(edges.size(), 0);
  for (NodeId u = 0; u < graph.n_users(); ++u) {
    const std::int64_t deg = graph.degree(u);
    if (deg < 2) continue;
    std::vector<std::int64_t> slots(static_cast<std::size_t>(deg));
    std::iota(slots.begin(), slots.end(), graph.row_ptr()[u]);
    std::shuffle(slots.begin(), slots.end(), rng);
    const auto h = std::clamp<std::int64_t>(std::llround(fraction * static_cast<double>(deg)), 1, deg - 1);
    for (std::int64_t k = 0; k < h; ++k) held[graph.slot_edge(slots[k])] = 1;
  }
  for (std::size_t e = 0; e < edges.size(); ++e) (held[e] ? validation : train).push_back(edges[e]);
  return {std::move(train), std::move(validation)};
}

EmbeddingTable init_embeddings(std::int64_t n_nodes, int dim, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  EmbeddingTable x(n_nodes, dim);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = normal(rng);
  return x;
}

std::vector<std::vector<Positive>> make_batches(const InteractionGraph& graph,
                                                std::size_t batch_size, Rng& rng) {
  std::vector<Positive> all;
  all.reserve(static_cast<std::size_t>(graph.n_edges()));
  for (std::int64_t e = 0; e < graph.n_edges(); ++e) all.emplace_back(graph.edge_user(e), graph.edge_item(e));
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<std::vector<Positive>> batches;
  const std::size_t bs = std::max<std::size_t>(batch_size, 1);
  for (std::size_t b = 0; b < all.size(); b += bs) {
    batches.emplace_back(all.begin() + static_cast<std::ptrdiff_t>(b),
                         all.begin() + static_cast<std::ptrdiff_t>(std::min(all.size(), b + bs)));
  }
  return batches;
}

PretrainResult pretrain(const InteractionGraph& graph, const ModelConfig& model,
                        const TrainConfig& train, const RngStreams& streams,
                        const EpochCallback& on_epoch) {
  if (graph.n_edges() == 0) throw std::invalid_argument("pretrain: empty graph");
  Rng split_rng = streams.stream("split");
  auto [train_edges, val_edges] = split_validation(graph, train.validation_fraction, split_rng);
  const InteractionGraph train_graph =
      InteractionGraph::build(train_edges, graph.n_users(), graph.n_items(), graph.tau_seconds());
  PropagationWeights weights = make_weights(train_graph, model.temporal);
  weights.threads = model.threads;

  Rng init_rng = streams.stream("init");
  EmbeddingTable x = init_embeddings(graph.n_nodes(), model.dim, train.init_std, init_rng);
  PretrainResult result;
  result.embeddings = x;
  if (train.max_epochs <= 0) return result;

  ItemHistory seen(graph.n_users());
  seen.add(train_edges);
  Rng shuffle_rng = streams.stream("shuffle");
  Rng neg_rng = streams.stream("negatives");
  Adam adam({.learning_rate = train.learning_rate});
  const std::size_t block = adam.add_block(static_cast<std::size_t>(x.size()));

  double best = -std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= train.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t count = 0;
    for (const auto& batch : make_batches(train_graph, train.batch_size, shuffle_rng)) {
      const auto triples = sample_negatives(train_graph, batch, neg_rng);
      const auto grads = bpr_gradients(weights, x, triples, model.layers, train.l2_reg);
      adam.begin_step();
      adam.update(block, x, grads.x0);
      loss_sum += grads.loss;
      count += triples.size();
    }
    EpochRecord rec{epoch, count ? loss_sum / static_cast<double>(count) : 0.0, -1.0};
    if (!val_edges.empty()) {
      const Matrix final_x = forward(weights, x, model.layers);
      rec.validation_recall =
          evaluate(final_x, graph.n_users(), graph.n_items(), val_edges, seen, {},
                   {.k = train.eval_k, .threads = model.threads})
              .recall;
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (val_edges.empty() || rec.validation_recall > best) {
      best = rec.validation_recall;
      result.embeddings = x;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= train.patience) {
      break;
    }
  }
  result.optimizer = adam.state();
  return result;
}

}  // namespace snaprec
