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
#include "snaprec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "snaprec/parallel.hpp"
#include "snaprec/rng.hpp"

namespace snaprec {
namespace {

std::vector<NodeId> sorted_unique(std::span<const NodeId> ids) {
  std::vector<NodeId> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool contains(std::span<const NodeId> sorted, NodeId id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

std::vector<NodeId> top_k(const Matrix& x, NodeId user, std::vector<NodeId> candidates,
                          std::size_t k) {
  if (k == 0) throw std::invalid_argument("rank: k must be at least 1");
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(candidates.size());
  const auto xu = x.row(user);
  for (NodeId i : candidates) scored.emplace_back(xu.dot(x.row(i)), i);
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<NodeId> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = scored[r].second;
  return out;
}

}  // namespace

std::vector<NodeId> rank_items(const Matrix& x, NodeId user, std::int64_t n_users,
                               std::int64_t n_items, std::span<const NodeId> masked,
                               std::size_t k) {
  std::vector<char> skip(static_cast<std::size_t>(n_items), 0);
  for (NodeId i : masked) {
    if (i >= n_users && i < n_users + n_items) skip[i - n_users] = 1;
  }
  std::vector<NodeId> candidates;
  candidates.reserve(static_cast<std::size_t>(n_items));
  for (std::int64_t j = 0; j < n_items; ++j) {
    if (!skip[j]) candidates.push_back(n_users + j);
  }
  return top_k(x, user, std::move(candidates), k);
}

std::vector<NodeId> rank_candidates(const Matrix& x, NodeId user, std::span<const NodeId> candidates,
                                    std::span<const NodeId> masked, std::size_t k) {
  const auto mask = sorted_unique(masked);
  std::vector<NodeId> keep;
  for (NodeId i : sorted_unique(candidates)) {
    if (!contains(mask, i)) keep.push_back(i);
  }
  return top_k(x, user, std::move(keep), k);
}

std::optional<double> recall_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant) {
  const auto rel = sorted_unique(relevant);
  if (rel.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (NodeId i : sorted_unique(ranked)) hits += contains(rel, i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

std::optional<double> ndcg_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant,
                                std::size_t k) {
  const auto rel = sorted_unique(relevant);
  if (rel.empty()) return std::nullopt;
  double dcg = 0.0;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t p = 0; p < depth; ++p) {
    if (contains(rel, ranked[p])) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  }
  double idcg = 0.0;
  for (std::size_t p = 0; p < std::min(k, rel.size()); ++p) {
    idcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  }
  return dcg / idcg;
}

UserSplit split_tuned_untuned(std::span<const NodeId> test_users,
                              std::span<const NodeId> finetune_users) {
  const auto tuned = sorted_unique(finetune_users);
  UserSplit split;
  for (NodeId u : sorted_unique(test_users)) {
    (contains(tuned, u) ? split.tuned : split.untuned).push_back(u);
  }
  return split;
}

void ItemHistory::add(std::span<const Interaction> edges) {
  for (const auto& e : edges) items_.at(e.user).push_back(e.item);
  for (auto& row : items_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
}

void ItemHistory::add(const ItemHistory& other) {
  for (std::size_t u = 0; u < items_.size(); ++u) {
    auto& row = items_[u];
    const auto extra = other.items(static_cast<NodeId>(u));
    row.insert(row.end(), extra.begin(), extra.end());
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
}

GroupMetrics summarize(std::span<const UserMetrics> users) {
  GroupMetrics g;
  g.users = users.size();
  if (users.empty()) return g;
  for (const auto& u : users) {
    g.recall += u.recall;
    g.ndcg += u.ndcg;
  }
  g.recall /= static_cast<double>(users.size());
  g.ndcg /= static_cast<double>(users.size());
  return g;
}

MetricsReport evaluate(const Matrix& x, std::int64_t n_users, std::int64_t n_items,
                       std::span<const Interaction> test, const ItemHistory& seen,
                       std::span<const NodeId> finetune_users, const EvalOptions& options) {
  std::vector<std::vector<NodeId>> relevant(static_cast<std::size_t>(n_users));
  for (const auto& e : test) relevant.at(e.user).push_back(e.item);
  std::vector<NodeId> users;
  for (NodeId u = 0; u < n_users; ++u) {
    auto& rel = relevant[u];
    std::sort(rel.begin(), rel.end());
    rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
    const auto mask = seen.items(u);
    std::erase_if(rel, [&](NodeId i) { return contains(mask, i); });
    if (!rel.empty()) users.push_back(u);
  }
  const auto tuned = sorted_unique(finetune_users);

  std::vector<UserMetrics> per_user(users.size());
  parallel_for(users.size(), options.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      const NodeId u = users[idx];
      const auto& rel = relevant[u];
      std::vector<NodeId> ranked;
      if (options.sampled_candidates == 0) {
        ranked = rank_items(x, u, n_users, n_items, seen.items(u), options.k);
      } else {
        Rng rng(splitmix64(options.seed ^ static_cast<std::uint64_t>(u)));
        std::uniform_int_distribution<std::int64_t> pick(0, n_items - 1);
        std::vector<NodeId> candidates(rel.begin(), rel.end());
        const auto mask = seen.items(u);
        // Bounded rejection so tiny catalogs cannot loop forever.
        for (std::size_t tries = 0; candidates.size() < rel.size() + options.sampled_candidates &&
                                    tries < 20 * options.sampled_candidates;
             ++tries) {
          const NodeId i = n_users + pick(rng);
          if (!contains(mask, i) && !contains(rel, i)) candidates.push_back(i);
        }
        ranked = rank_candidates(x, u, candidates, mask, options.k);
      }
      per_user[idx] = {u, *recall_at_k(ranked, rel), *ndcg_at_k(ranked, rel, options.k), rel.size(),
                       contains(tuned, u)};
    }
  });

  MetricsReport report;
  report.k = options.k;
  const GroupMetrics all = summarize(per_user);
  report.recall = all.recall;
  report.ndcg = all.ndcg;
  std::vector<UserMetrics> t, n;
  for (const auto& m : per_user) (m.tuned ? t : n).push_back(m);
  report.tuned = summarize(t);
  report.untuned = summarize(n);
  report.per_user = std::move(per_user);
  return report;
}

}  // namespace snaprec
