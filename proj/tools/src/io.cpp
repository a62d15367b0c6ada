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
#include "io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace snaprec::cli {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json group_json(const GroupMetrics& g, std::size_t k) {
  const std::string kk = std::to_string(k);
  return {{"users", g.users}, {"recall@" + kk, g.recall}, {"ndcg@" + kk, g.ndcg}};
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string sha256_table(const Matrix& table) {
  return sha256_hex({reinterpret_cast<const char*>(table.data()),
                     static_cast<std::size_t>(table.size()) * sizeof(double)});
}

Dataset load_dataset(const std::filesystem::path& path, const RunConfig& config) {
  Dataset d;
  d.path = std::filesystem::absolute(path);
  const std::string bytes = read_file(path);
  d.input_hash = sha256_hex(bytes);
  std::istringstream in(bytes);
  std::vector<Interaction> raw;
  try {
    raw = ingest_interactions(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path.string() + ":" + std::to_string(e.line()) + ": " + e.what());
  }
  if (raw.empty()) throw std::runtime_error(path.string() + ": no interactions");
  d.vocab = Vocabulary::from(raw);
  const auto edges = d.vocab.remap(raw);
  d.series = segment_snapshots(edges, d.vocab.n_users(), d.vocab.n_items(),
                               config.pretrain_span_seconds(), config.granularity_seconds());
  return d;
}

RunConfig load_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  RunConfig c;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read config " + config_path);
    c = parse_config(in);
  }
  for (const auto& o : overrides) apply_override(c, o);
  return c;
}

ordered_json manifest(std::string_view command, const RunConfig& config, const Dataset& data) {
  ordered_json cfg = ordered_json::object();
  std::istringstream lines(to_text(config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return {{"tool", "snaprec"},
          {"version", "0.1.0"},
          {"command", command},
          {"seed", config.seed},
          {"deterministic", config.deterministic},
          {"config_hash", sha256_hex(to_text(config))},
          {"input", data.path.string()},
          {"input_hash", data.input_hash},
          {"n_users", data.vocab.n_users()},
          {"n_items", data.vocab.n_items()},
          {"config", cfg}};
}

ordered_json snapshot_manifest(const SnapshotSeries& s) {
  std::vector<std::size_t> counts;
  for (const auto& snap : s.snapshots) counts.push_back(snap.size());
  return {{"start", s.start},
          {"pretrain_end", s.pretrain_end},
          {"pretrain_edges", s.pretrain_edges.size()},
          {"boundaries", s.boundaries},
          {"edge_counts", counts}};
}

ordered_json metrics_json(const MetricsReport& r) {
  const std::string kk = std::to_string(r.k);
  return {{"users", r.users()},
          {"recall@" + kk, r.recall},
          {"ndcg@" + kk, r.ndcg},
          {"tuned_user_metrics", group_json(r.tuned, r.k)},
          {"untuned_user_metrics", group_json(r.untuned, r.k)}};
}

ordered_json metrics_json(const SnapshotRecord& rec, const RunConfig& config) {
  ordered_json j = {{"snapshot", rec.snapshot},
                    {"test_snapshot", rec.snapshot + 1},
                    {"evaluated", rec.evaluated}};
  if (!rec.note.empty()) j["note"] = rec.note;
  j.update(metrics_json(rec.metrics));
  j["epochs"] = rec.epochs;
  // Timing would break byte-identical outputs, so it is omitted in deterministic mode.
  j["wall_time"] = config.deterministic ? ordered_json(nullptr) : ordered_json(rec.wall_time);
  j["train_edges"] = rec.train_edges;
  j["test_edges"] = rec.test_edges;
  j["prompt_edges"] = rec.prompt_edges;
  return j;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

ordered_json read_json(const std::filesystem::path& path) {
  try {
    return ordered_json::parse(read_file(path));
  } catch (const ordered_json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_epoch_log(const std::filesystem::path& path, const std::vector<EpochRecord>& log) {
  std::ostringstream out;
  out << std::setprecision(17) << "epoch,mean_loss,validation_recall\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << e.mean_loss << ',';
    if (e.validation_recall >= 0) out << e.validation_recall;
    out << '\n';
  }
  write_text(path, out.str());
}

void write_per_user_header(std::ostream& out) {
  out << "snapshot,user,recall,ndcg,relevant,tuned\n";
}

void append_per_user(std::ostream& out, std::size_t snapshot, const MetricsReport& report,
                     const Vocabulary& vocab) {
  out << std::setprecision(17);
  for (const auto& m : report.per_user) {
    out << snapshot << ',' << vocab.raw_user(m.user) << ',' << m.recall << ',' << m.ndcg << ','
        << m.relevant << ',' << (m.tuned ? 1 : 0) << '\n';
  }
}

void finalize_manifest(const std::filesystem::path& dir, ordered_json manifest,
                       const std::vector<std::string>& files) {
  ordered_json digests = ordered_json::object();
  for (const auto& f : files) digests[f] = sha256_file(dir / f);
  manifest["files"] = digests;
  write_json(dir / "manifest.json", manifest);
}

}  // namespace snaprec::cli
