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
#include "snaprec/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>

namespace snaprec {
namespace {

bool parse_field(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out >= 0;
}

}  // namespace

std::vector<Interaction> ingest_interactions(std::istream& in) {
  std::vector<Interaction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v(line);
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    if (v.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<std::string_view> fields;
    for (std::size_t pos = 0;;) {
      const std::size_t tab = v.find('\t', pos);
      fields.push_back(v.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 3) throw ParseError(lineno, "expected user<TAB>item<TAB>ts_unix");
    Interaction x;
    if (!parse_field(fields[0], x.user) || !parse_field(fields[1], x.item) ||
        !parse_field(fields[2], x.ts)) {
      throw ParseError(lineno, "fields must be non-negative integers");
    }
    out.push_back(x);
  }
  return out;
}

Vocabulary Vocabulary::from(std::span<const Interaction> raw) {
  Vocabulary v;
  for (const auto& x : raw) {
    v.raw_users_.push_back(x.user);
    v.raw_items_.push_back(x.item);
  }
  for (auto* ids : {&v.raw_users_, &v.raw_items_}) {
    std::sort(ids->begin(), ids->end());
    ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
  }
  for (std::size_t i = 0; i < v.raw_users_.size(); ++i) {
    v.user_index_.emplace(v.raw_users_[i], static_cast<NodeId>(i));
  }
  const auto nu = static_cast<NodeId>(v.raw_users_.size());
  for (std::size_t i = 0; i < v.raw_items_.size(); ++i) {
    v.item_index_.emplace(v.raw_items_[i], nu + static_cast<NodeId>(i));
  }
  return v;
}

NodeId Vocabulary::user_node(std::int64_t raw_user) const {
  auto it = user_index_.find(raw_user);
  if (it == user_index_.end()) throw std::out_of_range("unknown user " + std::to_string(raw_user));
  return it->second;
}

NodeId Vocabulary::item_node(std::int64_t raw_item) const {
  auto it = item_index_.find(raw_item);
  if (it == item_index_.end()) throw std::out_of_range("unknown item " + std::to_string(raw_item));
  return it->second;
}

std::vector<Interaction> Vocabulary::remap(std::span<const Interaction> raw) const {
  std::vector<Interaction> out;
  out.reserve(raw.size());
  for (const auto& x : raw) out.push_back({user_node(x.user), item_node(x.item), x.ts});
  return out;
}

std::vector<std::int64_t> relative_timesteps(std::span<const std::int64_t> ts, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  std::vector<std::int64_t> steps(ts.size());
  if (ts.empty()) return steps;
  const std::int64_t lo = *std::min_element(ts.begin(), ts.end());
  for (std::size_t e = 0; e < ts.size(); ++e) {
    steps[e] = static_cast<std::int64_t>(std::floor(static_cast<double>(ts[e] - lo) / tau));
  }
  return steps;
}

std::vector<std::int64_t> relative_timesteps(const InteractionGraph& graph, double tau) {
  return relative_timesteps(graph.edge_ts(), tau);
}

std::vector<double> normalize_times(std::span<const std::int64_t> steps) {
  std::vector<double> out(steps.size(), 0.0);
  if (steps.empty()) return out;
  const auto [lo, hi] = std::minmax_element(steps.begin(), steps.end());
  if (*hi == *lo) return out;
  const double span = static_cast<double>(*hi - *lo);
  for (std::size_t e = 0; e < steps.size(); ++e) {
    out[e] = static_cast<double>(steps[e] - *lo) / span;
  }
  return out;
}

InteractionGraph InteractionGraph::build(std::span<const Interaction> edges, std::int64_t n_users,
                                         std::int64_t n_items, double tau_seconds) {
  if (n_users < 0 || n_items < 0) throw std::invalid_argument("negative vocabulary size");
  if (!(tau_seconds > 0.0)) throw std::invalid_argument("tau must be positive");
  InteractionGraph g;
  g.n_users_ = n_users;
  g.n_items_ = n_items;
  g.tau_seconds_ = tau_seconds;
  const std::int64_t n_nodes = n_users + n_items;

  std::vector<Interaction> sorted(edges.begin(), edges.end());
  for (const auto& x : sorted) {
    if (x.user < 0 || x.user >= n_users || x.item < n_users || x.item >= n_nodes) {
      throw std::out_of_range("edge (" + std::to_string(x.user) + "," + std::to_string(x.item) +
                              ") outside the id range");
    }
  }
  // Latest timestamp first within each pair so unique() keeps it.
  std::sort(sorted.begin(), sorted.end(), [](const Interaction& a, const Interaction& b) {
    if (a.user != b.user) return a.user < b.user;
    if (a.item != b.item) return a.item < b.item;
    return a.ts > b.ts;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const Interaction& a, const Interaction& b) {
                             return a.user == b.user && a.item == b.item;
                           }),
               sorted.end());

  const std::size_t m = sorted.size();
  g.edge_user_.resize(m);
  g.edge_item_.resize(m);
  g.edge_ts_.resize(m);
  for (std::size_t e = 0; e < m; ++e) {
    g.edge_user_[e] = sorted[e].user;
    g.edge_item_[e] = sorted[e].item;
    g.edge_ts_[e] = sorted[e].ts;
  }
  g.edge_step_ = relative_timesteps(g.edge_ts_, tau_seconds);
  g.edge_time_norm_ = normalize_times(g.edge_step_);

  g.row_ptr_.assign(n_nodes + 1, 0);
  for (std::size_t e = 0; e < m; ++e) {
    ++g.row_ptr_[g.edge_user_[e] + 1];
    ++g.row_ptr_[g.edge_item_[e] + 1];
  }
  std::partial_sum(g.row_ptr_.begin(), g.row_ptr_.end(), g.row_ptr_.begin());
  g.col_.resize(2 * m);
  g.slot_edge_.resize(2 * m);
  g.reverse_slot_.resize(2 * m);
  std::vector<std::int64_t> cursor(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
  std::vector<std::int64_t> user_slot(m);
  // Edges are sorted by (user, item): user rows fill in ascending item order.
  for (std::size_t e = 0; e < m; ++e) {
    const std::int64_t s = cursor[g.edge_user_[e]]++;
    g.col_[s] = g.edge_item_[e];
    g.slot_edge_[s] = static_cast<std::int64_t>(e);
    user_slot[e] = s;
  }
  // Item rows fill in ascending user order for the same reason.
  for (std::size_t e = 0; e < m; ++e) {
    const std::int64_t s = cursor[g.edge_item_[e]]++;
    g.col_[s] = g.edge_user_[e];
    g.slot_edge_[s] = static_cast<std::int64_t>(e);
    g.reverse_slot_[s] = user_slot[e];
    g.reverse_slot_[user_slot[e]] = s;
  }
  return g;
}

bool InteractionGraph::has_edge(NodeId user, NodeId item) const {
  if (!is_user(user) || !is_item(item)) return false;
  const auto row = neighbors(user);
  return std::binary_search(row.begin(), row.end(), item);
}

std::vector<Interaction> InteractionGraph::interactions() const {
  std::vector<Interaction> out(edge_user_.size());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = {edge_user_[e], edge_item_[e], edge_ts_[e]};
  return out;
}

SnapshotSeries segment_snapshots(std::span<const Interaction> interactions, std::int64_t n_users,
                                 std::int64_t n_items, std::int64_t pretrain_span,
                                 std::int64_t granularity) {
  if (interactions.empty()) throw std::invalid_argument("no interactions to segment");
  if (pretrain_span <= 0 || granularity <= 0) {
    throw std::invalid_argument("pretrain span and granularity must be positive");
  }
  SnapshotSeries s;
  s.n_users = n_users;
  s.n_items = n_items;
  s.start = std::min_element(interactions.begin(), interactions.end(),
                             [](const auto& a, const auto& b) { return a.ts < b.ts; })
                ->ts;
  s.pretrain_end = s.start + pretrain_span;

  std::int64_t last_bucket = -1;
  for (const auto& x : interactions) {
    if (x.ts >= s.pretrain_end) {
      last_bucket = std::max(last_bucket, (x.ts - s.pretrain_end) / granularity);
    }
  }
  if (last_bucket < 0) throw std::invalid_argument("no snapshots remain after the pre-training span");

  s.snapshots.resize(static_cast<std::size_t>(last_bucket + 1));
  for (std::int64_t n = 0; n <= last_bucket; ++n) {
    s.boundaries.push_back(s.pretrain_end + (n + 1) * granularity);
  }
  for (const auto& x : interactions) {
    if (x.ts < s.pretrain_end) {
      s.pretrain_edges.push_back(x);
    } else {
      s.snapshots[static_cast<std::size_t>((x.ts - s.pretrain_end) / granularity)].push_back(x);
    }
  }
  return s;
}

}  // namespace snaprec
