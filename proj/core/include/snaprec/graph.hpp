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
#include <istream>
#include <span>
#include <unordered_map>
#include <vector>

#include "snaprec/types.hpp"

namespace snaprec {

// One timestamped user-item interaction. Straight out of a file the ids are
// the raw ones; after Vocabulary::remap they are global node ids.
struct Interaction {
  std::int64_t user = 0;
  std::int64_t item = 0;
  std::int64_t ts = 0;  // unix seconds

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

// Parses `user<TAB>item<TAB>ts_unix` lines. Blank lines are skipped. Throws
// ParseError naming the 1-based line on anything else that is malformed.
std::vector<Interaction> ingest_interactions(std::istream& in);

// Dense global id space: users sorted by raw id take [0, n_users), items
// sorted by raw id take [n_users, n_users + n_items).
class Vocabulary {
 public:
  static Vocabulary from(std::span<const Interaction> raw);

  std::int64_t n_users() const { return static_cast<std::int64_t>(raw_users_.size()); }
  std::int64_t n_items() const { return static_cast<std::int64_t>(raw_items_.size()); }
  std::int64_t n_nodes() const { return n_users() + n_items(); }

  NodeId user_node(std::int64_t raw_user) const;
  NodeId item_node(std::int64_t raw_item) const;
  std::int64_t raw_user(NodeId node) const { return raw_users_.at(node); }
  std::int64_t raw_item(NodeId node) const { return raw_items_.at(node - n_users()); }

  std::vector<Interaction> remap(std::span<const Interaction> raw) const;

 private:
  std::vector<std::int64_t> raw_users_;
  std::vector<std::int64_t> raw_items_;
  std::unordered_map<std::int64_t, NodeId> user_index_;
  std::unordered_map<std::int64_t, NodeId> item_index_;
};

// t = floor((ts - min ts) / tau), tau in seconds.
std::vector<std::int64_t> relative_timesteps(std::span<const std::int64_t> ts, double tau);

// Min-max scaling to [0,1]; all-equal input maps to 0.
std::vector<double> normalize_times(std::span<const std::int64_t> steps);

// Bidirectional user-item graph with per-edge temporal attributes. Immutable
// once built.
//
// Undirected edges are stored once, sorted by (user, item). The adjacency is
// a single CSR over all nodes: a user's row lists its items and an item's
// row lists its users, each in ascending node id. Every directed slot knows
// its undirected edge and the slot of the opposite direction.
class InteractionGraph {
 public:
  InteractionGraph() = default;

  // Duplicate (user, item) pairs collapse to one edge with the latest
  // timestamp. Timesteps use `tau_seconds` over this edge set.
  static InteractionGraph build(std::span<const Interaction> edges, std::int64_t n_users,
                                std::int64_t n_items, double tau_seconds);

  std::int64_t n_users() const { return n_users_; }
  std::int64_t n_items() const { return n_items_; }
  std::int64_t n_nodes() const { return n_users_ + n_items_; }
  std::int64_t n_edges() const { return static_cast<std::int64_t>(edge_user_.size()); }
  std::int64_t n_slots() const { return static_cast<std::int64_t>(col_.size()); }
  double tau_seconds() const { return tau_seconds_; }

  bool is_user(NodeId n) const { return n >= 0 && n < n_users_; }
  bool is_item(NodeId n) const { return n >= n_users_ && n < n_nodes(); }

  std::int64_t degree(NodeId n) const { return row_ptr_[n + 1] - row_ptr_[n]; }
  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const NodeId> col() const { return col_; }
  std::span<const NodeId> neighbors(NodeId n) const {
    return std::span<const NodeId>(col_).subspan(row_ptr_[n], degree(n));
  }
  std::int64_t slot_edge(std::int64_t slot) const { return slot_edge_[slot]; }
  std::int64_t reverse_slot(std::int64_t slot) const { return reverse_slot_[slot]; }

  NodeId edge_user(std::int64_t e) const { return edge_user_[e]; }
  NodeId edge_item(std::int64_t e) const { return edge_item_[e]; }
  std::span<const std::int64_t> edge_ts() const { return edge_ts_; }
  std::span<const std::int64_t> edge_step() const { return edge_step_; }
  std::span<const double> edge_time_norm() const { return edge_time_norm_; }

  bool has_edge(NodeId user, NodeId item) const;

  // Deduplicated edge list in storage order.
  std::vector<Interaction> interactions() const;

 private:
  std::int64_t n_users_ = 0;
  std::int64_t n_items_ = 0;
  double tau_seconds_ = 1.0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<NodeId> col_;
  std::vector<std::int64_t> slot_edge_;
  std::vector<std::int64_t> reverse_slot_;
  std::vector<NodeId> edge_user_;
  std::vector<NodeId> edge_item_;
  std::vector<std::int64_t> edge_ts_;
  std::vector<std::int64_t> edge_step_;
  std::vector<double> edge_time_norm_;
};

// Relative timesteps of the graph's edges for a (possibly different) tau.
std::vector<std::int64_t> relative_timesteps(const InteractionGraph& graph, double tau);

// Pre-training edges plus consecutive time-sliced snapshots. Snapshot n
// (0-based here) holds edges with ts in [boundaries[n-1], boundaries[n]),
// where boundaries[-1] is pretrain_end.
struct SnapshotSeries {
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;
  std::int64_t start = 0;         // min ts
  std::int64_t pretrain_end = 0;  // start + pretrain span
  std::vector<std::int64_t> boundaries;
  std::vector<Interaction> pretrain_edges;
  std::vector<std::vector<Interaction>> snapshots;

  std::size_t size() const { return snapshots.size(); }
  InteractionGraph pretrain_graph(double tau_seconds) const {
    return InteractionGraph::build(pretrain_edges, n_users, n_items, tau_seconds);
  }
  InteractionGraph snapshot_graph(std::size_t n, double tau_seconds) const {
    return InteractionGraph::build(snapshots.at(n), n_users, n_items, tau_seconds);
  }
};

// Edges with ts < min_ts + pretrain_span form the pre-training set; the rest
// fall into buckets of width `granularity` (the last one may be partial).
// Empty interior buckets are kept as empty snapshots. Interactions must
// already be remapped.
SnapshotSeries segment_snapshots(std::span<const Interaction> interactions, std::int64_t n_users,
                                 std::int64_t n_items, std::int64_t pretrain_span,
                                 std::int64_t granularity);

}  // namespace snaprec
