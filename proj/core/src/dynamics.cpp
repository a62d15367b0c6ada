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
#include "snaprec/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <span>
#include <stdexcept>

#include "snaprec/propagation.hpp"

namespace snaprec {
namespace {

std::vector<NodeId> users_of(std::span<const Interaction> edges) {
  std::vector<NodeId> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back(e.user);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

WindowBuffer::WindowBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("window buffer needs omega >= 1");
}

void WindowBuffer::push(std::size_t snapshot, EmbeddingTable table) {
  if (!entries_.empty()) {
    if (snapshot <= entries_.front().snapshot) {
      throw std::invalid_argument("window buffer: snapshots must be pushed in increasing order");
    }
    if (table.rows() != entries_.front().table.rows() ||
        table.cols() != entries_.front().table.cols()) {
      throw std::invalid_argument("window buffer: table shape mismatch");
    }
  }
  entries_.push_front({snapshot, std::move(table)});
  if (entries_.size() > capacity_) entries_.pop_back();
}

EmbeddingTable interpolative_init(const EmbeddingTable& x_p, const WindowBuffer& buffer) {
  if (buffer.empty()) return x_p;
  EmbeddingTable weighted = EmbeddingTable::Zero(x_p.rows(), x_p.cols());
  double norm = 0.0;
  for (std::size_t k = 0; k < buffer.size(); ++k) {
    const auto& t = buffer.table(k);
    if (t.rows() != x_p.rows() || t.cols() != x_p.cols()) {
      throw std::invalid_argument("interpolative_init: table shape mismatch");
    }
    const double i = static_cast<double>(k + 1);
    weighted += i * t;
    norm += i;
  }
  return (x_p + weighted / norm) / 2.0;
}

DynamicSummary summarize(const std::vector<SnapshotRecord>& records) {
  DynamicSummary s;
  double users = 0.0;
  for (const auto& r : records) {
    if (!r.evaluated) continue;
    ++s.evaluated;
    s.macro_recall += r.metrics.recall;
    s.macro_ndcg += r.metrics.ndcg;
    const auto n = static_cast<double>(r.metrics.users());
    s.micro_recall += n * r.metrics.recall;
    s.micro_ndcg += n * r.metrics.ndcg;
    users += n;
  }
  if (s.evaluated > 0) {
    s.macro_recall /= static_cast<double>(s.evaluated);
    s.macro_ndcg /= static_cast<double>(s.evaluated);
  }
  if (users > 0) {
    s.micro_recall /= users;
    s.micro_ndcg /= users;
  }
  return s;
}

StepOutput finetune_step(const SnapshotSeries& series, const RunConfig& config,
                         const EmbeddingTable& x_init, std::size_t t) {
  const auto& train = series.snapshots.at(t);
  const RngStreams streams(config.seed);
  const ModelConfig model = config.model();
  const double tau = config.tau_seconds();
  StepOutput out;
  if (config.no_prompt_tuning) {
    out.x_n0 = x_init;
  } else {
    Rng sample_rng = streams.stream("prompt-sampling", t);
    const auto prompt =
        build_prompt_graph(series.pretrain_edges, std::span(series.snapshots).subspan(0, t + 1),
                           series.n_users, series.n_items, config.phi, tau, sample_rng);
    out.prompt_edges = static_cast<std::size_t>(prompt.graph.n_edges());
    Rng gate_rng = streams.stream("random-gate", t);
    out.x_n0 =
        prompt_forward(random_gate(x_init, config.random_gate_std, gate_rng), prompt.graph, model);
  }
  const InteractionGraph g_n = InteractionGraph::build(train, series.n_users, series.n_items, tau);
  Rng ft_rng = streams.stream("finetune", t);
  out.tuned = config.no_gate
                  ? finetune_embeddings(g_n, out.x_n0, model, config.finetune_config(), ft_rng)
                  : finetune(g_n, out.x_n0, model, config.finetune_config(), ft_rng);
  return out;
}

DynamicReport run_dynamic(const SnapshotSeries& series, const RunConfig& config,
                          const std::optional<EmbeddingTable>& pretrained,
                          const DynamicHooks& hooks) {
  config.validate();
  if (series.size() < 2) throw std::invalid_argument("run_dynamic needs at least 2 snapshots");
  const RngStreams streams(config.seed);
  const ModelConfig model = config.model();
  const double tau = config.tau_seconds();
  const std::int64_t nu = series.n_users;
  const std::int64_t ni = series.n_items;

  DynamicReport report;
  const InteractionGraph g_p = series.pretrain_graph(tau);
  if (pretrained) {
    if (pretrained->rows() != g_p.n_nodes() || pretrained->cols() != config.dim) {
      throw std::invalid_argument("run_dynamic: pre-trained table has the wrong shape");
    }
    report.pretrain.embeddings = *pretrained;
  } else {
    report.pretrain = pretrain(g_p, model, config.pretrain_config(), streams, hooks.on_pretrain_epoch);
  }
  const EmbeddingTable& x_p = report.pretrain.embeddings;
  report.last = x_p;

  std::optional<EmbeddingTable> frozen;
  if (config.no_finetune) frozen = forward(g_p, x_p, model.layers, model.temporal);

  ItemHistory seen(nu);
  seen.add(series.pretrain_edges);
  WindowBuffer buffer(static_cast<std::size_t>(config.omega));

  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    const auto start = std::chrono::steady_clock::now();
    const auto& train = series.snapshots[t];
    const auto& test = series.snapshots[t + 1];
    seen.add(train);

    SnapshotRecord rec;
    rec.snapshot = t + 1;
    rec.train_edges = train.size();
    rec.test_edges = test.size();
    const auto finetune_users = users_of(train);

    if (frozen) {
      rec.metrics = evaluate(*frozen, nu, ni, test, seen, finetune_users, config.eval_options());
    } else if (train.empty()) {
      rec.note = "empty training snapshot; skipped";
    } else {
      const EmbeddingTable x_init =
          config.no_interp_update ? x_p : interpolative_init(x_p, buffer);
      StepOutput step = finetune_step(series, config, x_init, t);
      const FinetuneResult& tuned = step.tuned;
      rec.prompt_edges = step.prompt_edges;
      rec.epochs = tuned.epochs;
      rec.metrics = evaluate(tuned.output, nu, ni, test, seen, finetune_users, config.eval_options());
      report.last = tuned.output;
      buffer.push(rec.snapshot, tuned.output);
    }
    if (rec.note.empty()) {
      rec.evaluated = rec.metrics.users() > 0;
      if (!rec.evaluated) rec.note = "no evaluable test users";
    }
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (hooks.on_snapshot) hooks.on_snapshot(rec);
    report.records.push_back(std::move(rec));
  }
  report.buffer_size = buffer.size();
  report.summary = summarize(report.records);
  return report;
}

}  // namespace snaprec
