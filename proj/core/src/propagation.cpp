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
#include "snaprec/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "snaprec/parallel.hpp"

namespace snaprec {
namespace {

PropagationWeights layout_of(const InteractionGraph& graph) {
  PropagationWeights w;
  w.n_nodes = graph.n_nodes();
  w.row_ptr.assign(graph.row_ptr().begin(), graph.row_ptr().end());
  w.col.assign(graph.col().begin(), graph.col().end());
  w.weight.assign(w.col.size(), 0.0);
  w.transpose_weight.assign(w.col.size(), 0.0);
  return w;
}

void fill_transpose(const InteractionGraph& graph, PropagationWeights& w) {
  for (std::int64_t s = 0; s < graph.n_slots(); ++s) {
    w.transpose_weight[graph.reverse_slot(s)] = w.weight[s];
  }
}

void check_rows(const PropagationWeights& w, const Matrix& x, const char* what) {
  if (x.rows() != w.n_nodes) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(w.n_nodes) +
                                " rows, got " + std::to_string(x.rows()));
  }
}

Matrix gather(const PropagationWeights& w, const std::vector<double>& weight, const Matrix& x) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  parallel_for(static_cast<std::size_t>(w.n_nodes), w.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t u = b; u < e; ++u) {
      auto row = out.row(static_cast<Eigen::Index>(u));
      for (std::int64_t s = w.row_ptr[u]; s < w.row_ptr[u + 1]; ++s) {
        row.noalias() += weight[s] * x.row(w.col[s]);
      }
    }
  });
  return out;
}

}  // namespace

std::vector<double> temporal_softmax(const InteractionGraph& graph) {
  std::vector<double> alpha(graph.n_slots(), 0.0);
  const auto t = graph.edge_time_norm();
  const auto rp = graph.row_ptr();
  for (NodeId u = 0; u < graph.n_nodes(); ++u) {
    if (rp[u] == rp[u + 1]) continue;
    double hi = -1.0;
    for (std::int64_t s = rp[u]; s < rp[u + 1]; ++s) hi = std::max(hi, t[graph.slot_edge(s)]);
    double z = 0.0;
    for (std::int64_t s = rp[u]; s < rp[u + 1]; ++s) {
      alpha[s] = std::exp(t[graph.slot_edge(s)] - hi);
      z += alpha[s];
    }
    for (std::int64_t s = rp[u]; s < rp[u + 1]; ++s) alpha[s] /= z;
  }
  return alpha;
}

PropagationWeights edge_weights(const InteractionGraph& graph, std::span<const double> alpha) {
  if (static_cast<std::int64_t>(alpha.size()) != graph.n_slots()) {
    throw std::invalid_argument("edge_weights: alpha does not match the graph");
  }
  PropagationWeights w = layout_of(graph);
  for (NodeId u = 0; u < graph.n_nodes(); ++u) {
    const double du = static_cast<double>(graph.degree(u));
    for (std::int64_t s = w.row_ptr[u]; s < w.row_ptr[u + 1]; ++s) {
      const double dv = static_cast<double>(graph.degree(w.col[s]));
      w.weight[s] = 1.0 / (2.0 * std::sqrt(du * dv)) + alpha[s] / 2.0;
    }
  }
  fill_transpose(graph, w);
  return w;
}

PropagationWeights symmetric_weights(const InteractionGraph& graph) {
  PropagationWeights w = layout_of(graph);
  for (NodeId u = 0; u < graph.n_nodes(); ++u) {
    const double du = static_cast<double>(graph.degree(u));
    for (std::int64_t s = w.row_ptr[u]; s < w.row_ptr[u + 1]; ++s) {
      w.weight[s] = 1.0 / std::sqrt(du * static_cast<double>(graph.degree(w.col[s])));
    }
  }
  fill_transpose(graph, w);
  return w;
}

Matrix PropagationWeights::dense() const {
  Matrix a = Matrix::Zero(n_nodes, n_nodes);
  for (NodeId u = 0; u < n_nodes; ++u) {
    for (std::int64_t s = row_ptr[u]; s < row_ptr[u + 1]; ++s) a(u, col[s]) += weight[s];
  }
  return a;
}

Matrix propagate_layer(const PropagationWeights& w, const Matrix& x) {
  check_rows(w, x, "propagate_layer");
  return gather(w, w.weight, x);
}

Matrix propagate_transpose(const PropagationWeights& w, const Matrix& grad) {
  check_rows(w, grad, "propagate_transpose");
  return gather(w, w.transpose_weight, grad);
}

EmbeddingTable forward(const PropagationWeights& w, const Matrix& x0, int layers) {
  check_rows(w, x0, "forward");
  if (layers < 0) throw std::invalid_argument("forward: negative layer count");
  Matrix acc = x0;
  Matrix cur = x0;
  for (int l = 0; l < layers; ++l) {
    cur = propagate_layer(w, cur);
    acc += cur;
  }
  acc /= static_cast<double>(layers + 1);
  for (NodeId u = 0; u < w.n_nodes; ++u) {
    if (w.degree(u) == 0) acc.row(u) = x0.row(u);
  }
  return acc;
}

Matrix forward_backward(const PropagationWeights& w, const Matrix& grad_final, int layers) {
  check_rows(w, grad_final, "forward_backward");
  if (layers < 0) throw std::invalid_argument("forward_backward: negative layer count");
  Matrix g = grad_final / static_cast<double>(layers + 1);
  for (NodeId u = 0; u < w.n_nodes; ++u) {
    if (w.degree(u) == 0) g.row(u).setZero();
  }
  Matrix acc = g;
  for (int l = 0; l < layers; ++l) {
    g = propagate_transpose(w, g);
    acc += g;
  }
  for (NodeId u = 0; u < w.n_nodes; ++u) {
    if (w.degree(u) == 0) acc.row(u) = grad_final.row(u);
  }
  return acc;
}

}  // namespace snaprec
