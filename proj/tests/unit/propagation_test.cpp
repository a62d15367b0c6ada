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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "snaprec/propagation.hpp"
#include "synthetic.hpp"

namespace snaprec {
namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = n(rng);
  return m;
}

// One user (0) and one item (1) joined by a single edge.
InteractionGraph single_edge() {
  return InteractionGraph::build(std::vector<Interaction>{{0, 1, 5}}, 1, 1, 1.0);
}

TEST(TemporalSoftmaxTest, UniformForEqualTimes) {
  const auto g = InteractionGraph::build(std::vector<Interaction>{{0, 1, 3}, {0, 2, 3}}, 1, 2, 1.0);
  const auto alpha = temporal_softmax(g);
  EXPECT_DOUBLE_EQ(alpha[0], 0.5);
  EXPECT_DOUBLE_EQ(alpha[1], 0.5);
  // Each item has a single neighbor.
  EXPECT_DOUBLE_EQ(alpha[2], 1.0);
  EXPECT_DOUBLE_EQ(alpha[3], 1.0);
}

TEST(TemporalSoftmaxTest, TwoNeighborsAtZeroAndOne) {
  const auto g = InteractionGraph::build(std::vector<Interaction>{{0, 1, 0}, {0, 2, 1}}, 1, 2, 1.0);
  const auto alpha = temporal_softmax(g);
  const double e = std::exp(1.0);
  EXPECT_NEAR(alpha[0], 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(alpha[1], e / (1.0 + e), 1e-15);
  EXPECT_NEAR(alpha[0], 0.2689, 1e-4);
}

TEST(TemporalSoftmaxTest, RowsSumToOneAndFavorRecentEdges) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const auto g = InteractionGraph::build(testing::random_edges(15, 12, 0.3, 100, rng), 15, 12, 3.0);
    const auto alpha = temporal_softmax(g);
    const auto t = g.edge_time_norm();
    for (NodeId u = 0; u < g.n_nodes(); ++u) {
      if (g.degree(u) == 0) continue;
      double sum = 0.0;
      for (std::int64_t s = g.row_ptr()[u]; s < g.row_ptr()[u + 1]; ++s) {
        sum += alpha[s];
        for (std::int64_t r = g.row_ptr()[u]; r < g.row_ptr()[u + 1]; ++r) {
          if (t[g.slot_edge(s)] > t[g.slot_edge(r)]) EXPECT_GT(alpha[s], alpha[r]);
        }
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(EdgeWeightsTest, UnitDegreesGiveWeightOne) {
  const auto g = single_edge();
  const auto w = make_weights(g, /*temporal=*/true);
  EXPECT_DOUBLE_EQ(w.weight[0], 1.0);
  EXPECT_DOUBLE_EQ(w.weight[1], 1.0);
}

TEST(EdgeWeightsTest, DirectSubstitution) {
  // User 0 with four items; the first item's only neighbor is user 0.
  std::vector<Interaction> edges;
  for (NodeId i = 1; i <= 4; ++i) edges.push_back({0, i, 0});
  const auto g = InteractionGraph::build(edges, 1, 4, 1.0);
  std::vector<double> alpha(g.n_slots(), 0.5);
  const auto w = edge_weights(g, alpha);
  // deg(u)=4, deg(v)=1, alpha=0.5: 1/(2*2) + 0.25.
  EXPECT_DOUBLE_EQ(w.weight[0], 0.5);
  EXPECT_THROW(edge_weights(g, std::vector<double>(3, 0.5)), std::invalid_argument);
}

TEST(EdgeWeightsTest, NoTemporalIsClassicSymmetricNorm) {
  std::vector<Interaction> edges;
  for (NodeId i = 1; i <= 4; ++i) edges.push_back({0, i, i});
  const auto g = InteractionGraph::build(edges, 1, 4, 1.0);
  const auto w = make_weights(g, /*temporal=*/false);
  for (double v : w.weight) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(PropagateTest, SingleEdgeCopiesNeighbor) {
  const auto w = make_weights(single_edge(), true);
  Matrix x(2, 2);
  x << 0, 0, 1, 2;
  const Matrix out = propagate_layer(w, x);
  EXPECT_EQ(out(0, 0), 1.0);
  EXPECT_EQ(out(0, 1), 2.0);

  Matrix g(2, 2);
  g << 1, 0, 0, 0;
  const Matrix back = propagate_transpose(w, g);
  EXPECT_EQ(back(1, 0), 1.0);
  EXPECT_EQ(back(1, 1), 0.0);
  EXPECT_TRUE(propagate_transpose(w, Matrix::Zero(2, 2)).isZero(0));
}

TEST(PropagateTest, EmptyGraphGivesZeros) {
  const auto w = make_weights(InteractionGraph::build({}, 2, 3, 1.0), true);
  Rng rng(1);
  EXPECT_TRUE(propagate_layer(w, random_matrix(5, 3, rng)).isZero(0));
}

TEST(PropagateTest, DimensionMismatchThrows) {
  const auto w = make_weights(single_edge(), true);
  EXPECT_THROW(propagate_layer(w, Matrix::Zero(3, 2)), std::invalid_argument);
  EXPECT_THROW(propagate_transpose(w, Matrix::Zero(1, 2)), std::invalid_argument);
  EXPECT_THROW(forward(w, Matrix::Zero(3, 2), 1), std::invalid_argument);
}

TEST(PropagateTest, MatchesDenseOracleAndAdjoint) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    std::uniform_int_distribution<int> size(2, 25);
    const int nu = size(rng), ni = size(rng);
    for (bool temporal : {true, false}) {
      const auto g = InteractionGraph::build(testing::random_edges(nu, ni, 0.2, 50, rng), nu, ni, 7.0);
      const auto w = make_weights(g, temporal);
      const Matrix a = testing::dense_operator(g, temporal);
      const Matrix x = random_matrix(g.n_nodes(), 4, rng);
      const Matrix y = random_matrix(g.n_nodes(), 4, rng);
      EXPECT_LT((w.dense() - a).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((propagate_layer(w, x) - a * x).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT((propagate_transpose(w, y) - a.transpose() * y).cwiseAbs().maxCoeff(), 1e-10);
      const double lhs = propagate_layer(w, x).cwiseProduct(y).sum();
      const double rhs = x.cwiseProduct(propagate_transpose(w, y)).sum();
      EXPECT_NEAR(lhs, rhs, 1e-8);
    }
  }
}

TEST(ForwardTest, IsolatedNodeKeepsLayerZero) {
  // Node 2 (second item) has no edges.
  const auto g = InteractionGraph::build(std::vector<Interaction>{{0, 1, 0}}, 1, 2, 1.0);
  Matrix x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  const Matrix out = forward(g, x, 2);
  EXPECT_EQ(out(2, 0), 3.0);
  EXPECT_EQ(out(2, 1), 3.0);
}

TEST(ForwardTest, LayerMeanByHand) {
  Matrix x(2, 2);
  x << 0, 0, 2, 0;
  const Matrix out = forward(single_edge(), x, 1);
  EXPECT_DOUBLE_EQ(out(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out(0, 1), 0.0);
}

TEST(ForwardTest, ZeroInputGivesZeroOutput) {
  Rng rng(5);
  const auto g = InteractionGraph::build(testing::random_edges(10, 10, 0.3, 10, rng), 10, 10, 1.0);
  EXPECT_TRUE(forward(g, Matrix::Zero(20, 3), 3).isZero(0));
}

TEST(ForwardTest, MatchesDenseForwardAndBackward) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    Rng rng(seed);
    const auto g = InteractionGraph::build(testing::random_edges(9, 11, 0.25, 30, rng), 9, 11, 4.0);
    const auto w = make_weights(g, true);
    const Matrix a = testing::dense_operator(g, true);
    const Matrix x = random_matrix(20, 3, rng);
    const Matrix y = random_matrix(20, 3, rng);
    for (int layers : {0, 1, 3}) {
      const Matrix f = forward(w, x, layers);
      EXPECT_LT((f - testing::dense_forward(a, x, layers)).cwiseAbs().maxCoeff(), 1e-10);
      // forward is linear, so forward_backward is its adjoint.
      EXPECT_NEAR(f.cwiseProduct(y).sum(), x.cwiseProduct(forward_backward(w, y, layers)).sum(),
                  1e-8);
    }
  }
}

TEST(ForwardTest, StaysFiniteOverManyLayers) {
  Rng rng(9);
  const auto g = InteractionGraph::build(testing::random_edges(50, 50, 0.1, 0, rng), 50, 50, 1.0);
  const Matrix out = forward(g, random_matrix(100, 8, rng), 10);
  EXPECT_TRUE(out.allFinite());
  EXPECT_LT(out.cwiseAbs().maxCoeff(), 1e6);
}

TEST(PropagateTest, ThreadCountDoesNotChangeBits) {
  Rng rng(21);
  const auto g = InteractionGraph::build(testing::random_edges(40, 30, 0.2, 100, rng), 40, 30, 5.0);
  auto w = make_weights(g, true);
  const Matrix x = random_matrix(70, 6, rng);
  const Matrix one = forward(w, x, 3);
  w.threads = 4;
  const Matrix four = forward(w, x, 3);
  EXPECT_TRUE((one.array() == four.array()).all());
}

}  // namespace
}  // namespace snaprec
