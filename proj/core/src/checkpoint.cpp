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
#include "snaprec/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace snaprec {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");

constexpr char kMagic[8] = {'S', 'N', 'A', 'P', 'R', 'E', 'C', '1'};
constexpr std::uint32_t kEmbeddingKind = 1;
constexpr std::uint32_t kGateKind = 2;

struct Header {
  std::uint32_t kind = 0;
  std::int64_t dim = 0;
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;
  std::int64_t step = 0;
};

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("checkpoint truncated");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, const Header& h) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, h.kind);
  put(out, std::uint32_t{0});
  put(out, h.dim);
  put(out, h.n_users);
  put(out, h.n_items);
  put(out, h.step);
  return out;
}

Header open_in(std::ifstream& in, const std::filesystem::path& path, std::uint32_t kind) {
  if (!in) throw std::runtime_error("cannot read " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(path.string() + " is not a checkpoint");
  }
  Header h;
  h.kind = get<std::uint32_t>(in);
  get<std::uint32_t>(in);
  h.dim = get<std::int64_t>(in);
  h.n_users = get<std::int64_t>(in);
  h.n_items = get<std::int64_t>(in);
  h.step = get<std::int64_t>(in);
  if (h.kind != kind) throw std::runtime_error(path.string() + ": unexpected checkpoint kind");
  if (h.dim < 0 || h.n_users < 0 || h.n_items < 0) throw std::runtime_error("corrupt header");
  return h;
}

void write_doubles(std::ofstream& out, const double* data, Eigen::Index n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* data, Eigen::Index n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint truncated");
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const EmbeddingCheckpoint& ckpt) {
  if (ckpt.table.rows() != ckpt.n_users + ckpt.n_items) {
    throw std::invalid_argument("checkpoint: table rows do not match the vocabulary");
  }
  auto out = open_out(path, {kEmbeddingKind, ckpt.table.cols(), ckpt.n_users, ckpt.n_items,
                             ckpt.optimizer_step});
  write_doubles(out, ckpt.table.data(), ckpt.table.size());
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

EmbeddingCheckpoint read_embedding_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const Header h = open_in(in, path, kEmbeddingKind);
  EmbeddingCheckpoint c{h.n_users, h.n_items, h.step, EmbeddingTable(h.n_users + h.n_items, h.dim)};
  read_doubles(in, c.table.data(), c.table.size());
  return c;
}

void write_checkpoint(const std::filesystem::path& path, const GateCheckpoint& ckpt) {
  auto out = open_out(path, {kGateKind, ckpt.gate.dim(), ckpt.n_users, ckpt.n_items,
                             ckpt.optimizer_step});
  write_doubles(out, ckpt.gate.weight.data(), ckpt.gate.weight.size());
  write_doubles(out, ckpt.gate.bias.data(), ckpt.gate.bias.size());
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GateCheckpoint read_gate_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const Header h = open_in(in, path, kGateKind);
  GateCheckpoint c{h.n_users, h.n_items, h.step, GateParams::zeros(h.dim, /*learnable=*/true)};
  read_doubles(in, c.gate.weight.data(), c.gate.weight.size());
  read_doubles(in, c.gate.bias.data(), c.gate.bias.size());
  return c;
}

}  // namespace snaprec
