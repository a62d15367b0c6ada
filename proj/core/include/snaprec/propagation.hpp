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

#include <span>
#include <vector>

#include "snaprec/graph.hpp"
#include "snaprec/types.hpp"

namespace snaprec {

// Per-directed-slot softmax of the normalized edge times over each node's
// own neighborhood: alpha[u->v] = exp(t_uv) / sum_{v' in N(u)} exp(t_uv').
// Aligned with graph.col().
std::vector<double> temporal_softmax(const InteractionGraph& graph);

// Linear propagation operator A over the graph's CSR: (A X)_u = sum_v w[u<-v] x_v.
// Carries the weights of the transposed operator in the same layout, so that
// both directions are row gathers with a fixed summation order.
struct PropagationWeights {
  std::int64_t n_nodes = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<NodeId> col;
  std::vector<double> weight;            // slot u->v holds w[u<-v]
  std::vector<double> transpose_weight;  // slot v->u holds w[u<-v]
  int threads = 1;

  std::int64_t degree(NodeId n) const { return row_ptr[n + 1] - row_ptr[n]; }

  // Dense n_nodes x n_nodes copy of A. Test and debugging aid.
  Matrix dense() const;
};

// w[u<-v] = 1 / (2 sqrt(|N_u| |N_v|)) + alpha[u->v] / 2.
PropagationWeights edge_weights(const InteractionGraph& graph, std::span<const double> alpha);

// Classic symmetric normalization w[u<-v] = 1 / sqrt(|N_u| |N_v|), i.e. the
// propagation with the temporal term switched off.
PropagationWeights symmetric_weights(const InteractionGraph& graph);

inline PropagationWeights make_weights(const InteractionGraph& graph, bool temporal) {
  return temporal ? edge_weights(graph, temporal_softmax(graph)) : symmetric_weights(graph);
}

// One message-passing step. Isolated nodes get zero rows.
Matrix propagate_layer(const PropagationWeights& w, const Matrix& x);

// Applies A^T: the gradient at u flows to each neighbor v scaled by w[u<-v].
Matrix propagate_transpose(const PropagationWeights& w, const Matrix& grad);

// Mean of layers 0..layers. Nodes without neighbors keep their layer-0 row
// instead of being averaged with zero rows.
EmbeddingTable forward(const PropagationWeights& w, const Matrix& x0, int layers);

inline EmbeddingTable forward(const InteractionGraph& graph, const Matrix& x0, int layers,
                              bool temporal = true) {
  return forward(make_weights(graph, temporal), x0, layers);
}

// Pulls a gradient w.r.t. the output of forward() back to its input x0.
Matrix forward_backward(const PropagationWeights& w, const Matrix& grad_final, int layers);

}  // namespace snaprec
