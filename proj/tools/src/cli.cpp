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
#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "io.hpp"
#include "snaprec/checkpoint.hpp"
#include "snaprec/dynamics.hpp"
#include "snaprec/propagation.hpp"

namespace snaprec::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string per_user;
  bool quiet = false;
};

std::vector<NodeId> users_of(std::span<const Interaction> edges) {
  std::vector<NodeId> out;
  for (const auto& e : edges) out.push_back(e.user);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Everything visible before snapshot `t` (0-based) is tested.
ItemHistory seen_before(const SnapshotSeries& s, std::size_t t) {
  ItemHistory seen(s.n_users);
  seen.add(s.pretrain_edges);
  for (std::size_t n = 0; n < t; ++n) seen.add(s.snapshots[n]);
  return seen;
}

std::size_t snapshot_index(int k, const SnapshotSeries& s) {
  if (k < 1 || static_cast<std::size_t>(k) > s.size()) {
    throw std::runtime_error("--snapshot must be in [1, " + std::to_string(s.size()) + "]");
  }
  return static_cast<std::size_t>(k - 1);
}

std::string snapshot_file(std::size_t n) {
  std::ostringstream name;
  name << "snapshot_" << std::setw(3) << std::setfill('0') << n << ".json";
  return name.str();
}

void write_common(const fs::path& dir, const RunConfig& config, const Dataset& data,
                  std::vector<std::string>& files) {
  fs::create_directories(dir);
  write_text(dir / "config.txt", to_text(config));
  write_json(dir / "snapshots.json", snapshot_manifest(data.series));
  files.insert(files.end(), {"config.txt", "snapshots.json"});
}

// The data file named by an upstream manifest, with a digest check.
Dataset upstream_dataset(const ordered_json& m, const std::string& data_override,
                         const RunConfig& config) {
  const fs::path path = data_override.empty() ? fs::path(m.at("input").get<std::string>())
                                              : fs::path(data_override);
  Dataset d = load_dataset(path, config);
  if (d.input_hash != m.at("input_hash").get<std::string>()) {
    throw std::runtime_error(path.string() + " does not match the input hash in the manifest");
  }
  return d;
}

int cmd_pretrain(const Common& c, const std::string& data_path, const std::string& out_dir,
                 const Log& log) {
  const RunConfig config = load_config(c.config, c.overrides);
  const Dataset data = load_dataset(data_path, config);
  log.info("pretrain: ", data.vocab.n_users(), " users, ", data.vocab.n_items(), " items, ",
           data.series.pretrain_edges.size(), " pre-training edges");
  const auto g_p = data.series.pretrain_graph(config.tau_seconds());
  const auto result = pretrain(g_p, config.model(), config.pretrain_config(), RngStreams(config.seed),
                               [&](const EpochRecord& e) {
                                 log.info("  epoch ", e.epoch, " loss ", e.mean_loss,
                                          e.validation_recall >= 0 ? " val_recall " : "",
                                          e.validation_recall >= 0 ? std::to_string(e.validation_recall) : "");
                               });
  const fs::path dir(out_dir);
  std::vector<std::string> files;
  write_common(dir, config, data, files);
  write_checkpoint(dir / "embeddings.bin",
                   EmbeddingCheckpoint{data.vocab.n_users(), data.vocab.n_items(),
                                       result.optimizer.step, result.embeddings});
  write_epoch_log(dir / "pretrain_log.csv", result.log);
  files.insert(files.end(), {"embeddings.bin", "pretrain_log.csv"});
  auto m = manifest("pretrain", config, data);
  m["best_epoch"] = result.best_epoch;
  finalize_manifest(dir, m, files);
  log.info("pretrain: best epoch ", result.best_epoch, ", wrote ", dir.string());
  return 0;
}

int cmd_finetune(const Common& c, const std::string& pretrained, int snapshot,
                 const std::string& data_override, const std::string& out_dir, const Log& log) {
  const fs::path up(pretrained);
  const ordered_json up_manifest = read_json(up / "manifest.json");
  if (up_manifest.at("command") != "pretrain") {
    throw std::runtime_error(up.string() + " is not a pre-training output");
  }
  const RunConfig config =
      load_config(c.config.empty() ? (up / "config.txt").string() : c.config, c.overrides);
  const Dataset data = upstream_dataset(up_manifest, data_override, config);
  const auto ckpt = read_embedding_checkpoint(up / "embeddings.bin");
  if (ckpt.table.rows() != data.vocab.n_nodes() || ckpt.table.cols() != config.dim) {
    throw std::runtime_error("pre-trained table does not match the data and config");
  }
  const std::size_t t = snapshot_index(snapshot, data.series);
  if (data.series.snapshots[t].empty()) throw std::runtime_error("snapshot is empty");

  const StepOutput step = finetune_step(data.series, config, ckpt.table, t);
  log.info("finetune: snapshot ", snapshot, ", ", step.tuned.epochs, " epochs, ",
           step.tuned.trainable_parameters, " trainable parameters");

  const fs::path dir(out_dir);
  std::vector<std::string> files;
  write_common(dir, config, data, files);
  const auto nu = data.vocab.n_users(), ni = data.vocab.n_items();
  write_checkpoint(dir / "embeddings.bin",
                   EmbeddingCheckpoint{nu, ni, step.tuned.optimizer.step, step.tuned.output});
  files.push_back("embeddings.bin");
  if (!config.no_gate) {
    write_checkpoint(dir / "gate.bin", GateCheckpoint{nu, ni, step.tuned.optimizer.step, step.tuned.gate});
    files.push_back("gate.bin");
  }
  write_epoch_log(dir / "finetune_log.csv", step.tuned.log);
  files.push_back("finetune_log.csv");

  auto m = manifest("finetune", config, data);
  m["snapshot"] = snapshot;
  m["pretrained"] = fs::absolute(up).string();
  m["pretrained_manifest_hash"] = sha256_file(up / "manifest.json");
  m["x_n0_hash"] = sha256_table(step.x_n0);
  m["epochs"] = step.tuned.epochs;
  m["trainable_parameters"] = step.tuned.trainable_parameters;
  if (t + 1 < data.series.size()) {
    const auto report = evaluate(step.tuned.output, nu, ni, data.series.snapshots[t + 1],
                                 seen_before(data.series, t + 1),
                                 users_of(data.series.snapshots[t]), config.eval_options());
    ordered_json metrics = {{"snapshot", snapshot}, {"test_snapshot", snapshot + 1}};
    metrics.update(metrics_json(report));
    write_json(dir / "metrics.json", metrics);
    files.push_back("metrics.json");
    log.info("finetune: recall@", config.k, " ", report.recall, " on snapshot ", snapshot + 1);
  }
  finalize_manifest(dir, m, files);
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& model_dir, int snapshot,
                 const std::string& data_override, const std::string& out_dir, std::ostream& out,
                 const Log& log) {
  const fs::path md(model_dir);
  const ordered_json m = read_json(md / "manifest.json");
  const std::string kind = m.at("command");
  if (kind != "pretrain" && kind != "finetune") {
    throw std::runtime_error(md.string() + " holds no evaluable model");
  }
  const RunConfig config =
      load_config(c.config.empty() ? (md / "config.txt").string() : c.config, c.overrides);
  const Dataset data = upstream_dataset(m, data_override, config);
  const auto ckpt = read_embedding_checkpoint(md / "embeddings.bin");
  if (ckpt.table.rows() != data.vocab.n_nodes()) {
    throw std::runtime_error("model does not match the data");
  }
  const std::size_t t = snapshot_index(snapshot, data.series);
  Matrix table;
  std::vector<NodeId> tuned_users;
  if (kind == "pretrain") {
    const auto g_p = data.series.pretrain_graph(config.tau_seconds());
    table = forward(g_p, ckpt.table, config.layers, !config.no_temporal);
  } else {
    table = ckpt.table;
    const auto trained = static_cast<std::size_t>(m.at("snapshot").get<int>() - 1);
    tuned_users = users_of(data.series.snapshots.at(trained));
  }
  const auto report = evaluate(table, data.vocab.n_users(), data.vocab.n_items(),
                               data.series.snapshots[t], seen_before(data.series, t), tuned_users,
                               config.eval_options());
  ordered_json metrics = {{"model", kind}, {"test_snapshot", snapshot}};
  metrics.update(metrics_json(report));
  out << metrics.dump(2) << '\n';
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_json(fs::path(out_dir) / "metrics.json", metrics);
  }
  if (!c.per_user.empty()) {
    std::ofstream pu(c.per_user);
    write_per_user_header(pu);
    append_per_user(pu, static_cast<std::size_t>(snapshot), report, data.vocab);
  }
  log.info("evaluate: ", report.users(), " users");
  return 0;
}

int cmd_run_dynamic(const Common& c, const std::string& data_path, const std::string& out_dir,
                    const Log& log) {
  const RunConfig config = load_config(c.config, c.overrides);
  const Dataset data = load_dataset(data_path, config);
  log.info("run-dynamic: ", data.vocab.n_users(), " users, ", data.vocab.n_items(), " items, ",
           data.series.size(), " snapshots");
  const fs::path dir(out_dir);
  std::vector<std::string> files;
  write_common(dir, config, data, files);

  std::ofstream per_user;
  if (!c.per_user.empty()) {
    per_user.open(c.per_user);
    if (!per_user) throw std::runtime_error("cannot write " + c.per_user);
    write_per_user_header(per_user);
  }
  DynamicHooks hooks;
  hooks.on_pretrain_epoch = [&](const EpochRecord& e) {
    log.info("  pretrain epoch ", e.epoch, " loss ", e.mean_loss);
  };
  hooks.on_snapshot = [&](const SnapshotRecord& rec) {
    const std::string name = snapshot_file(rec.snapshot);
    write_json(dir / name, metrics_json(rec, config));
    files.push_back(name);
    if (per_user.is_open()) append_per_user(per_user, rec.snapshot + 1, rec.metrics, data.vocab);
    if (rec.evaluated) {
      log.info("snapshot ", rec.snapshot, " -> ", rec.snapshot + 1, ": recall@", config.k, " ",
               rec.metrics.recall, " ndcg@", config.k, " ", rec.metrics.ndcg, " (", rec.epochs,
               " epochs)");
    } else {
      log.info("snapshot ", rec.snapshot, ": ", rec.note);
    }
  };
  const DynamicReport report = run_dynamic(data.series, config, std::nullopt, hooks);

  const auto nu = data.vocab.n_users(), ni = data.vocab.n_items();
  write_checkpoint(dir / "pretrained.bin",
                   EmbeddingCheckpoint{nu, ni, report.pretrain.optimizer.step, report.pretrain.embeddings});
  write_checkpoint(dir / "final.bin", EmbeddingCheckpoint{nu, ni, 0, report.last});
  write_epoch_log(dir / "pretrain_log.csv", report.pretrain.log);
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "average,snapshots,recall@" << config.k << ",ndcg@" << config.k << "\n";
  csv << "macro," << report.summary.evaluated << ',' << report.summary.macro_recall << ','
      << report.summary.macro_ndcg << "\n";
  csv << "micro," << report.summary.evaluated << ',' << report.summary.micro_recall << ','
      << report.summary.micro_ndcg << "\n";
  write_text(dir / "summary.csv", csv.str());
  files.insert(files.end(), {"pretrained.bin", "final.bin", "pretrain_log.csv", "summary.csv"});
  finalize_manifest(dir, manifest("run-dynamic", config, data), files);
  log.info("run-dynamic: macro recall@", config.k, " ", report.summary.macro_recall, ", wrote ",
           dir.string());
  return 0;
}

int cmd_report(const std::string& in_dir, std::ostream& out) {
  const fs::path dir(in_dir);
  const ordered_json m = read_json(dir / "manifest.json");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("snapshot_") && name.ends_with(".json")) files.push_back(entry.path());
  }
  if (files.empty() && fs::exists(dir / "metrics.json")) files.push_back(dir / "metrics.json");
  if (files.empty()) throw std::runtime_error(dir.string() + " holds no metric records");
  std::sort(files.begin(), files.end());

  const int k = std::stoi(m.at("config").at("k").get<std::string>());
  const std::string rk = "recall@" + std::to_string(k), nk = "ndcg@" + std::to_string(k);
  out << m.at("command").get<std::string>() << " report for " << dir.string() << "\n";
  out << std::left << std::setw(10) << "snapshot" << std::right << std::setw(8) << "users"
      << std::setw(12) << rk << std::setw(12) << nk << std::setw(8) << "epochs" << "\n";
  double sum_r = 0, sum_n = 0, users = 0, w_r = 0, w_n = 0;
  int evaluated = 0;
  for (const auto& f : files) {
    const ordered_json r = read_json(f);
    const auto test = r.at("test_snapshot").get<int>();
    out << std::left << std::setw(10) << test << std::right << std::setw(8)
        << r.at("users").get<std::size_t>();
    if (r.value("evaluated", true) && r.at("users").get<std::size_t>() > 0) {
      const double rec = r.at(rk).get<double>(), nd = r.at(nk).get<double>();
      const auto u = static_cast<double>(r.at("users").get<std::size_t>());
      out << std::fixed << std::setprecision(4) << std::setw(12) << rec << std::setw(12) << nd;
      out.unsetf(std::ios::floatfield);
      sum_r += rec;
      sum_n += nd;
      w_r += u * rec;
      w_n += u * nd;
      users += u;
      ++evaluated;
    } else {
      out << std::setw(12) << "-" << std::setw(12) << "-";
    }
    out << std::setw(8) << (r.contains("epochs") ? std::to_string(r.at("epochs").get<int>()) : "-");
    if (r.contains("note")) out << "  " << r.at("note").get<std::string>();
    out << "\n";
  }
  if (evaluated > 0) {
    out << std::fixed << std::setprecision(4);
    out << std::left << std::setw(18) << "mean (macro)" << std::right << std::setw(12)
        << sum_r / evaluated << std::setw(12) << sum_n / evaluated << "\n";
    out << std::left << std::setw(18) << "mean (micro)" << std::right << std::setw(12)
        << w_r / users << std::setw(12) << w_n / users << "\n";
    out.unsetf(std::ios::floatfield);
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"snaprec: dynamic graph recommendation with temporal prompts", "snaprec"};
  app.require_subcommand(1);
  Common c;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "key = value config file");
    sub->add_option("--set", c.overrides, "override a config key (key=value), repeatable");
    sub->add_flag("--quiet", c.quiet, "suppress progress logging");
  };

  std::string data, out_dir, pretrained, model, in_dir;
  int snapshot = 0;

  auto* pre = app.add_subcommand("pretrain", "pre-train embeddings on the pre-training span");
  pre->add_option("--data", data, "tab-separated user, item, timestamp file")->required();
  pre->add_option("--out", out_dir, "output directory")->required();
  add_common(pre);

  auto* ft = app.add_subcommand("finetune", "fine-tune the gate on one snapshot");
  ft->add_option("--pretrained", pretrained, "pretrain output directory")->required();
  ft->add_option("--snapshot", snapshot, "1-based snapshot index")->required();
  ft->add_option("--data", data, "data file (defaults to the one in the manifest)");
  ft->add_option("--out", out_dir, "output directory")->required();
  add_common(ft);

  auto* dyn = app.add_subcommand("run-dynamic", "run the full snapshot protocol");
  dyn->add_option("--data", data, "tab-separated user, item, timestamp file")->required();
  dyn->add_option("--out", out_dir, "output directory")->required();
  dyn->add_option("--per-user", c.per_user, "write per-user metrics CSV to this path");
  add_common(dyn);

  auto* ev = app.add_subcommand("evaluate", "evaluate a saved model on a snapshot");
  ev->add_option("--model", model, "pretrain or finetune output directory")->required();
  ev->add_option("--snapshot", snapshot, "1-based snapshot index to test on")->required();
  ev->add_option("--data", data, "data file (defaults to the one in the manifest)");
  ev->add_option("--out", out_dir, "optional output directory for metrics.json");
  ev->add_option("--per-user", c.per_user, "write per-user metrics CSV to this path");
  add_common(ev);

  auto* rep = app.add_subcommand("report", "print a metrics table for an output directory");
  rep->add_option("--in", in_dir, "output directory")->required();

  const std::vector<std::string> commands = {"pretrain", "finetune", "run-dynamic", "evaluate", "report"};
  if (argc > 1 && argv[1][0] != '-' &&
      std::find(commands.begin(), commands.end(), argv[1]) == commands.end()) {
    err << "unknown command '" << argv[1] << "'\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return 2;
  }

  const Log log(err, c.quiet);
  try {
    if (*pre) return cmd_pretrain(c, data, out_dir, log);
    if (*ft) return cmd_finetune(c, pretrained, snapshot, data, out_dir, log);
    if (*dyn) return cmd_run_dynamic(c, data, out_dir, log);
    if (*ev) return cmd_evaluate(c, model, snapshot, data, out_dir, out, log);
    if (*rep) return cmd_report(in_dir, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace snaprec::cli
