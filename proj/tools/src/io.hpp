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

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "snaprec/config.hpp"
#include "snaprec/dynamics.hpp"
#include "snaprec/eval.hpp"
#include "snaprec/graph.hpp"

namespace snaprec::cli {

using nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_table(const Matrix& table);

struct Dataset {
  std::filesystem::path path;
  std::string input_hash;
  Vocabulary vocab;
  SnapshotSeries series;
};

Dataset load_dataset(const std::filesystem::path& path, const RunConfig& config);

RunConfig load_config(const std::string& config_path, const std::vector<std::string>& overrides);

// Stderr logger that can be silenced with --quiet.
class Log {
 public:
  Log(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}
  template <typename... Args>
  void info(const Args&... args) const {
    if (quiet_) return;
    ((err_ << args), ...);
    err_ << '\n';
  }

 private:
  std::ostream& err_;
  bool quiet_;
};

ordered_json manifest(std::string_view command, const RunConfig& config, const Dataset& data);
ordered_json snapshot_manifest(const SnapshotSeries& series);
ordered_json metrics_json(const SnapshotRecord& record, const RunConfig& config);
ordered_json metrics_json(const MetricsReport& report);

void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const ordered_json& j);
ordered_json read_json(const std::filesystem::path& path);

void write_epoch_log(const std::filesystem::path& path, const std::vector<EpochRecord>& log);
void append_per_user(std::ostream& out, std::size_t snapshot, const MetricsReport& report,
                     const Vocabulary& vocab);
void write_per_user_header(std::ostream& out);

// Records every file written into `dir` with its digest.
void finalize_manifest(const std::filesystem::path& dir, ordered_json manifest,
                       const std::vector<std::string>& files);

}  // namespace snaprec::cli
