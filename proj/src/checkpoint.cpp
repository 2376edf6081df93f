// Copyright 2026 The vnhgcn Authors.
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


#include "vnhgcn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vnhgcn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

const std::string& Checkpoint::require(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw DataError("checkpoint: missing metadata key '" + key + "'");
  return it->second;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ConfigError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ostringstream head;
  head << "VNHGCN-CHECKPOINT " << Checkpoint::kVersion << "\n";
  for (const auto& [k, v] : ckpt.meta) head << "meta " << k << " " << v << "\n";
  std::size_t offset = 0;
  for (const auto& t : ckpt.tensors) {
    head << "tensor " << t.name << " " << t.value.rows() << " " << t.value.cols() << " " << offset << "\n";
    offset += static_cast<std::size_t>(t.value.size()) * sizeof(double);
  }
  head << "end " << offset << "\n";
  std::string blob = head.str();
  const std::size_t base = blob.size();
  blob.resize(base + offset);
  std::size_t at = base;
  for (const auto& t : ckpt.tensors) {
    const std::size_t bytes = static_cast<std::size_t>(t.value.size()) * sizeof(double);
    if (bytes) std::memcpy(blob.data() + at, t.value.data(), bytes);
    at += bytes;
  }
  write_file_atomic(path, blob);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::istringstream magic(line);
  std::string word;
  int version = 0;
  magic >> word >> version;
  if (word != "VNHGCN-CHECKPOINT") throw DataError("checkpoint: '" + path.string() + "' is not a checkpoint file");
  if (version != Checkpoint::kVersion)
    throw DataError("checkpoint: unsupported version " + std::to_string(version));

  struct Entry {
    std::string name;
    Index rows, cols;
    std::size_t offset;
  };
  std::vector<Entry> entries;
  Checkpoint ckpt;
  std::size_t data_bytes = 0;
  bool ended = false;
  while (!ended && std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> word;
    if (word == "meta") {
      std::string key, value;
      ls >> key;
      std::getline(ls >> std::ws, value);
      ckpt.meta[key] = value;
    } else if (word == "tensor") {
      Entry e;
      ls >> e.name >> e.rows >> e.cols >> e.offset;
      if (!ls || e.rows < 0 || e.cols < 0) throw DataError("checkpoint: malformed tensor line '" + line + "'");
      entries.push_back(e);
    } else if (word == "end") {
      ls >> data_bytes;
      ended = true;
    } else {
      throw DataError("checkpoint: unexpected manifest line '" + line + "'");
    }
  }
  if (!ended) throw DataError("checkpoint: manifest not terminated");
  std::string data(data_bytes, '\0');
  in.read(data.data(), static_cast<std::streamsize>(data_bytes));
  if (static_cast<std::size_t>(in.gcount()) != data_bytes) throw DataError("checkpoint: truncated data section");
  for (const auto& e : entries) {
    const std::size_t bytes = static_cast<std::size_t>(e.rows * e.cols) * sizeof(double);
    if (e.offset + bytes > data_bytes) throw DataError("checkpoint: tensor '" + e.name + "' overruns the data section");
    Matrix m(e.rows, e.cols);
    if (bytes) std::memcpy(m.data(), data.data() + e.offset, bytes);
    ckpt.tensors.push_back({e.name, std::move(m)});
  }
  return ckpt;
}

Checkpoint to_checkpoint(const ModelParams& params, const NetworkSchema& schema) {
  Checkpoint ckpt;
  ckpt.meta["attention_dim"] = std::to_string(params.attention_dim);
  ckpt.meta["target_type"] = schema.type(params.target_type).name;
  ckpt.meta["layers"] = std::to_string(params.plan.num_layers());
  for (std::size_t l = 0; l < params.plan.dims.size(); ++l) {
    std::string dims;
    for (Index d : params.plan.dims[l]) dims += (dims.empty() ? "" : ",") + std::to_string(d);
    ckpt.meta["dims." + std::to_string(l)] = dims;
  }
  std::string types;
  for (const auto& t : schema.node_types()) types += (types.empty() ? "" : ",") + t.name;
  ckpt.meta["node_types"] = types;
  const auto names = params.tensor_names(schema);
  const auto tensors = params.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) ckpt.tensors.push_back({names[k], *tensors[k]});
  return ckpt;
}

ModelParams params_from_checkpoint(const Checkpoint& ckpt, const NetworkSchema& schema) {
  ModelParams p;
  p.attention_dim = std::stol(ckpt.require("attention_dim"));
  const auto target = schema.find_type(ckpt.require("target_type"));
  if (!target) throw ShapeError("checkpoint: target type '" + ckpt.require("target_type") + "' not in the schema");
  p.target_type = *target;
  const long layers = std::stol(ckpt.require("layers"));
  for (long l = 0; l <= layers; ++l) {
    std::vector<Index> dims;
    std::istringstream ds(ckpt.require("dims." + std::to_string(l)));
    std::string tok;
    while (std::getline(ds, tok, ',')) dims.push_back(std::stol(tok));
    if (dims.size() != static_cast<std::size_t>(schema.num_types()))
      throw ShapeError("checkpoint: trained on " + std::to_string(dims.size()) + " node types (" +
                       ckpt.require("node_types") + "), data has " + std::to_string(schema.num_types()));
    p.plan.dims.push_back(std::move(dims));
  }
  // Allocate to the plan's shapes, then fill by name.
  p = init_params(schema, p.plan, p.attention_dim, p.target_type, 0);
  const auto names = p.tensor_names(schema);
  const auto tensors = p.tensors();
  std::map<std::string, const Matrix*> stored;
  for (const auto& t : ckpt.tensors) stored[t.name] = &t.value;
  std::string problems;
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    auto it = stored.find(names[k]);
    if (it == stored.end()) {
      problems += "\n  missing " + names[k] + " " + shape_str(*tensors[k]);
    } else if (it->second->rows() != tensors[k]->rows() || it->second->cols() != tensors[k]->cols()) {
      problems += "\n  " + names[k] + ": stored " + shape_str(*it->second) + ", expected " + shape_str(*tensors[k]);
    } else {
      *tensors[k] = *it->second;
    }
  }
  if (!problems.empty()) throw ShapeError("checkpoint does not match the dataset schema:" + problems);
  return p;
}

}  // namespace vnhgcn
