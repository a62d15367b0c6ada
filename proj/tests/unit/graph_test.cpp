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

#include <set>
#include <sstream>

#include "snaprec/graph.hpp"
#include "synthetic.hpp"

namespace snaprec {
namespace {

constexpr std::int64_t kDay = 86400;

TEST(IngestTest, ParsesTabSeparatedTriple) {
  std::istringstream in("0\t5\t100\n");
  const auto rows = ingest_interactions(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], (Interaction{0, 5, 100}));
}

TEST(IngestTest, MalformedLineNamesLineNumber) {
  std::istringstream in("a\t5\t100\n");
  try {
    ingest_interactions(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::istringstream second("1\t2\t3\n1\t2\n");
  EXPECT_THROW(ingest_interactions(second), ParseError);
  std::istringstream negative("1\t-2\t3\n");
  EXPECT_THROW(ingest_interactions(negative), ParseError);
  std::istringstream extra("1\t2\t3\t4\n");
  EXPECT_THROW(ingest_interactions(extra), ParseError);
}

TEST(IngestTest, EmptyInputAndDuplicatesAndCrlf) {
  std::istringstream empty("");
  EXPECT_TRUE(ingest_interactions(empty).empty());
  std::istringstream dup("1\t2\t10\r\n1\t2\t20\n\n1\t2\t30\n");
  EXPECT_EQ(ingest_interactions(dup).size(), 3u);
}

TEST(VocabularyTest, UsersFirstThenItems) {
  const std::vector<Interaction> raw = {{7, 100, 0}, {3, 100, 1}, {7, 50, 2}};
  const auto vocab = Vocabulary::from(raw);
  EXPECT_EQ(vocab.n_users(), 2);
  EXPECT_EQ(vocab.n_items(), 2);
  EXPECT_EQ(vocab.user_node(3), 0);
  EXPECT_EQ(vocab.user_node(7), 1);
  EXPECT_EQ(vocab.item_node(50), 2);
  EXPECT_EQ(vocab.item_node(100), 3);
  EXPECT_EQ(vocab.raw_item(3), 100);
  const auto dense = vocab.remap(raw);
  EXPECT_EQ(dense[0], (Interaction{1, 3, 0}));
  EXPECT_THROW(vocab.user_node(99), std::out_of_range);
}

TEST(SegmentTest, DailySnapshotsAfterFiveDayPretrainSpan) {
  std::vector<Interaction> edges;
  for (std::int64_t d = 0; d < 10; ++d) edges.push_back({0, 1, d * kDay});
  const auto s = segment_snapshots(edges, 1, 1, 5 * kDay, kDay);
  EXPECT_EQ(s.pretrain_edges.size(), 5u);
  ASSERT_EQ(s.size(), 5u);
  for (const auto& snap : s.snapshots) EXPECT_EQ(snap.size(), 1u);
  EXPECT_EQ(s.pretrain_end, 5 * kDay);
  EXPECT_EQ(s.boundaries.back(), 10 * kDay);
}

TEST(SegmentTest, HandPartition) {
  const std::vector<Interaction> edges = {{0, 1, 0}, {0, 1, 10}, {0, 1, 11}, {0, 1, 25}};
  const auto s = segment_snapshots(edges, 1, 1, 10, 10);
  ASSERT_EQ(s.pretrain_edges.size(), 1u);
  EXPECT_EQ(s.pretrain_edges[0].ts, 0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.snapshots[0].size(), 2u);
  ASSERT_EQ(s.snapshots[1].size(), 1u);
  EXPECT_EQ(s.snapshots[1][0].ts, 25);
  EXPECT_EQ(s.boundaries, (std::vector<std::int64_t>{20, 30}));
}

TEST(SegmentTest, ExhaustedDataIsAnError) {
  const std::vector<Interaction> edges = {{0, 1, 0}, {0, 1, 1}};
  try {
    segment_snapshots(edges, 1, 1, 2, 1);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("no snapshots remain"), std::string::npos);
  }
  EXPECT_THROW(segment_snapshots({}, 1, 1, 2, 1), std::invalid_argument);
  EXPECT_THROW(segment_snapshots(edges, 1, 1, 0, 1), std::invalid_argument);
}

TEST(SegmentTest, EveryEdgeLandsInItsTimeSlot) {
  Rng rng(3);
  const auto edges = testing::random_edges(10, 10, 0.5, 1000, rng);
  const auto s = segment_snapshots(edges, 10, 10, 300, 170);
  std::size_t total = s.pretrain_edges.size();
  for (const auto& e : s.pretrain_edges) EXPECT_LT(e.ts, s.pretrain_end);
  for (std::size_t n = 0; n < s.size(); ++n) {
    const std::int64_t lo = n == 0 ? s.pretrain_end : s.boundaries[n - 1];
    for (const auto& e : s.snapshots[n]) {
      EXPECT_GE(e.ts, lo);
      EXPECT_LT(e.ts, s.boundaries[n]);
    }
    total += s.snapshots[n].size();
  }
  EXPECT_EQ(total, edges.size());
}

TEST(BuildGraphTest, DuplicatesKeepLatestTimestamp) {
  const std::vector<Interaction> edges = {{0, 5, 100}, {0, 5, 200}};
  const auto g = InteractionGraph::build(edges, 5, 1, 1.0);
  ASSERT_EQ(g.n_edges(), 1);
  EXPECT_EQ(g.edge_ts()[0], 200);
  EXPECT_EQ(g.degree(0), 1);
  EXPECT_EQ(g.degree(5), 1);
}

TEST(BuildGraphTest, EmptyGraphIsValid) {
  const auto g = InteractionGraph::build({}, 3, 2, 1.0);
  EXPECT_EQ(g.n_edges(), 0);
  EXPECT_EQ(g.n_nodes(), 5);
  for (NodeId n = 0; n < 5; ++n) EXPECT_EQ(g.degree(n), 0);
}

TEST(BuildGraphTest, HandshakeIdentity) {
  const std::vector<Interaction> edges = {{0, 2, 1}, {0, 3, 1}, {1, 3, 1}};
  const auto g = InteractionGraph::build(edges, 2, 2, 1.0);
  EXPECT_EQ(g.degree(0) + g.degree(1), 3);
  EXPECT_EQ(g.degree(2) + g.degree(3), 3);
}

TEST(BuildGraphTest, RejectsIdsOutOfRange) {
  EXPECT_THROW(InteractionGraph::build(std::vector<Interaction>{{0, 0, 1}}, 1, 1, 1.0),
               std::out_of_range);
  EXPECT_THROW(InteractionGraph::build(std::vector<Interaction>{{0, 2, 1}}, 1, 1, 1.0),
               std::out_of_range);
}

TEST(BuildGraphTest, RandomGraphInvariants) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    auto edges = testing::random_edges(12, 9, 0.3, 500, rng);
    // Inject duplicates.
    const auto n = edges.size();
    for (std::size_t k = 0; k < n / 3; ++k) edges.push_back({edges[k].user, edges[k].item, 7});
    const auto g = InteractionGraph::build(edges, 12, 9, 37.0);

    std::int64_t users = 0, items = 0;
    for (NodeId u = 0; u < 12; ++u) users += g.degree(u);
    for (NodeId i = 12; i < 21; ++i) items += g.degree(i);
    EXPECT_EQ(users, g.n_edges());
    EXPECT_EQ(items, g.n_edges());

    // Both CSR directions describe the same undirected edge set.
    std::set<std::pair<NodeId, NodeId>> from_users, from_items, listed;
    for (NodeId u = 0; u < 12; ++u) {
      for (NodeId i : g.neighbors(u)) from_users.insert({u, i});
    }
    for (NodeId i = 12; i < 21; ++i) {
      for (NodeId u : g.neighbors(i)) from_items.insert({u, i});
    }
    for (const auto& e : g.interactions()) listed.insert({e.user, e.item});
    EXPECT_EQ(from_users, from_items);
    EXPECT_EQ(from_users, listed);
    EXPECT_EQ(listed.size(), static_cast<std::size_t>(g.n_edges()));

    for (std::int64_t s = 0; s < g.n_slots(); ++s) {
      EXPECT_EQ(g.reverse_slot(g.reverse_slot(s)), s);
      EXPECT_EQ(g.slot_edge(g.reverse_slot(s)), g.slot_edge(s));
    }
    const auto t = g.edge_time_norm();
    if (g.n_edges() > 0) {
      EXPECT_GE(*std::min_element(t.begin(), t.end()), 0.0);
      EXPECT_LE(*std::max_element(t.begin(), t.end()), 1.0);
    }
    std::set<std::int64_t> distinct(g.edge_step().begin(), g.edge_step().end());
    if (distinct.size() >= 2) {
      EXPECT_EQ(*std::min_element(t.begin(), t.end()), 0.0);
      EXPECT_EQ(*std::max_element(t.begin(), t.end()), 1.0);
    }
  }
}

TEST(TimestepTest, MinMapsToZero) {
  const std::vector<std::int64_t> ts = {100, 100};
  EXPECT_EQ(relative_timesteps(ts, 10), (std::vector<std::int64_t>{0, 0}));
}

TEST(TimestepTest, FloorDivision) {
  EXPECT_EQ(relative_timesteps(std::vector<std::int64_t>{0, 35}, 10),
            (std::vector<std::int64_t>{0, 3}));
  // Brute force: floor((ts - 50) / 10) for ts = 50, 60, 79.
  EXPECT_EQ(relative_timesteps(std::vector<std::int64_t>{50, 60, 79}, 10),
            (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_THROW(relative_timesteps(std::vector<std::int64_t>{1}, 0.0), std::invalid_argument);
}

TEST(TimestepTest, TranslationInvariantAndMatchesClosedForm) {
  Rng rng(11);
  std::uniform_int_distribution<std::int64_t> pick(0, 1'000'000);
  std::uniform_real_distribution<double> tau_pick(0.5, 5000.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> ts(20);
    for (auto& t : ts) t = pick(rng);
    const double tau = tau_pick(rng);
    const auto steps = relative_timesteps(ts, tau);
    const std::int64_t lo = *std::min_element(ts.begin(), ts.end());
    for (std::size_t e = 0; e < ts.size(); ++e) {
      EXPECT_EQ(steps[e], static_cast<std::int64_t>(std::floor((ts[e] - lo) / tau)));
    }
    std::vector<std::int64_t> shifted = ts;
    for (auto& t : shifted) t += 123'456;
    EXPECT_EQ(relative_timesteps(shifted, tau), steps);
  }
}

TEST(TimestepTest, GraphOverloadUsesEdgeTimestamps) {
  const std::vector<Interaction> edges = {{0, 1, 50}, {0, 2, 79}};
  const auto g = InteractionGraph::build(edges, 1, 2, 10.0);
  EXPECT_EQ(relative_timesteps(g, 10.0), (std::vector<std::int64_t>{0, 2}));
  EXPECT_EQ(std::vector<std::int64_t>(g.edge_step().begin(), g.edge_step().end()),
            (std::vector<std::int64_t>{0, 2}));
}

TEST(NormalizeTest, Examples) {
  EXPECT_EQ(normalize_times(std::vector<std::int64_t>{2, 4, 6}),
            (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(normalize_times(std::vector<std::int64_t>{7, 7, 7}),
            (std::vector<double>{0.0, 0.0, 0.0}));
  const auto v = normalize_times(std::vector<std::int64_t>{0, 1, 9});
  EXPECT_DOUBLE_EQ(v[1], 1.0 / 9.0);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[2], 1.0);
}

}  // namespace
}  // namespace snaprec
