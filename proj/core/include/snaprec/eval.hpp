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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "snaprec/graph.hpp"
#include "snaprec/types.hpp"

namespace snaprec {

// Top-k items for `user` by descending dot-product score among the items
// [n_users, n_users + n_items) not in `masked`. Ties go to the smaller id.
// Returns fewer than k items when fewer candidates remain.
std::vector<NodeId> rank_items(const Matrix& x, NodeId user, std::int64_t n_users,
                               std::int64_t n_items, std::span<const NodeId> masked,
                               std::size_t k);

// Same ranking restricted to an explicit candidate list.
std::vector<NodeId> rank_candidates(const Matrix& x, NodeId user, std::span<const NodeId> candidates,
                                    std::span<const NodeId> masked, std::size_t k);

// |ranked ∩ relevant| / |relevant|; nullopt for an empty relevant set, which
// excludes the user from averages.
std::optional<double> recall_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant);

// Binary-relevance nDCG with IDCG over min(|relevant|, k) positions.
std::optional<double> ndcg_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant,
                                std::size_t k);

struct UserSplit {
  std::vector<NodeId> tuned;
  std::vector<NodeId> untuned;
};

// Tuned users are test users that also appear in the fine-tuning edges.
UserSplit split_tuned_untuned(std::span<const NodeId> test_users,
                              std::span<const NodeId> finetune_users);

// Per-user sets of items visible at training time, used as the ranking mask.
class ItemHistory {
 public:
  explicit ItemHistory(std::int64_t n_users) : items_(static_cast<std::size_t>(n_users)) {}

  void add(std::span<const Interaction> edges);
  void add(const ItemHistory& other);
  std::span<const NodeId> items(NodeId user) const { return items_.at(user); }
  std::int64_t n_users() const { return static_cast<std::int64_t>(items_.size()); }

 private:
  std::vector<std::vector<NodeId>> items_;  // sorted, unique
};

struct UserMetrics {
  NodeId user = 0;
  double recall = 0.0;
  double ndcg = 0.0;
  std::size_t relevant = 0;
  bool tuned = false;
};

struct GroupMetrics {
  std::size_t users = 0;
  double recall = 0.0;
  double ndcg = 0.0;
};

struct MetricsReport {
  std::size_t k = 20;
  double recall = 0.0;  // macro average over evaluated users
  double ndcg = 0.0;
  std::vector<UserMetrics> per_user;  // ascending user id
  GroupMetrics tuned;
  GroupMetrics untuned;

  std::size_t users() const { return per_user.size(); }
};

struct EvalOptions {
  std::size_t k = 20;
  int threads = 1;
  // 0 ranks against every item; otherwise each user's candidates are its
  // relevant items plus this many sampled unseen items.
  std::size_t sampled_candidates = 0;
  std::uint64_t seed = 0;
};

// Scores every user with test edges. A user's relevant set is its test items
// that are not already in `seen`; users whose relevant set ends up empty are
// skipped.
MetricsReport evaluate(const Matrix& x, std::int64_t n_users, std::int64_t n_items,
                       std::span<const Interaction> test, const ItemHistory& seen,
                       std::span<const NodeId> finetune_users, const EvalOptions& options);

GroupMetrics summarize(std::span<const UserMetrics> users);

}  // namespace snaprec
