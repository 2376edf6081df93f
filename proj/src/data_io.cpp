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


#include "vnhgcn/data_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "vnhgcn/checkpoint.hpp"

namespace vnhgcn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CsvReader {
  fs::path path;
  std::ifstream in;
  std::size_t line_no = 0;

  explicit CsvReader(fs::path p) : path(std::move(p)), in(path) {
    if (!in) throw DataError("missing file: " + path.string());
  }

  std::string where() const { return path.string() + ":" + std::to_string(line_no); }

  /// Next non-empty line split on commas; false at end of file.
  bool next(std::vector<std::string_view>& fields, std::string& buffer) {
    while (std::getline(in, buffer)) {
      ++line_no;
      if (!buffer.empty() && buffer.back() == '\r') buffer.pop_back();
      if (buffer.empty()) continue;
      fields.clear();
      std::size_t start = 0;
      for (;;) {
        std::size_t comma = buffer.find(',', start);
        fields.emplace_back(std::string_view(buffer).substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  void expect_header(const std::vector<std::string>& names) {
    std::vector<std::string_view> f;
    std::string buf;
    if (!next(f, buf)) throw DataError(path.string() + ": empty file, expected a header");
    for (std::size_t i = 0; i < names.size(); ++i)
      if (i >= f.size() || f[i] != names[i])
        throw DataError(where() + ": header must start with '" + names[0] + (names.size() > 1 ? "," + names[1] : "") +
                        "'");
  }

  template <typename T>
  T parse(std::string_view s, const char* what) const {
    T v{};
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw DataError(where() + ": cannot parse " + what + " '" + std::string(s) + "'");
    return v;
  }
};

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

Matrix read_features(const fs::path& file, Index dim, const std::string& type_name) {
  CsvReader csv(file);
  csv.expect_header({"id"});
  std::vector<std::pair<Index, std::vector<double>>> rows;
  std::vector<std::string_view> f;
  std::string buf;
  while (csv.next(f, buf)) {
    if (static_cast<Index>(f.size()) != dim + 1)
      throw DataError(csv.where() + ": expected " + std::to_string(dim) + " features for type '" + type_name +
                      "', got " + std::to_string(static_cast<Index>(f.size()) - 1));
    std::vector<double> vals;
    for (std::size_t k = 1; k < f.size(); ++k) vals.push_back(csv.parse<double>(f[k], "feature"));
    rows.emplace_back(csv.parse<Index>(f[0], "node id"), std::move(vals));
  }
  const auto n = static_cast<Index>(rows.size());
  Matrix x(n, dim);
  std::vector<bool> seen(rows.size(), false);
  for (auto& [id, vals] : rows) {
    if (id < 0 || id >= n || seen[id])
      throw DataError(file.string() + ": node ids must be 0.." + std::to_string(n - 1) + " each exactly once (bad id " +
                      std::to_string(id) + ")");
    seen[id] = true;
    for (Index k = 0; k < dim; ++k) x(id, k) = vals[k];
  }
  return x;
}

EdgeList read_edges(const fs::path& file, const std::string& rel, Index nsrc, Index ndst, const std::string& src_name,
                    const std::string& dst_name) {
  CsvReader csv(file);
  csv.expect_header({"src", "dst"});
  EdgeList out;
  std::vector<std::string_view> f;
  std::string buf;
  while (csv.next(f, buf)) {
    if (f.size() != 2) throw DataError(csv.where() + ": expected 'src,dst'");
    Index s = csv.parse<Index>(f[0], "src id");
    Index d = csv.parse<Index>(f[1], "dst id");
    if (s < 0 || s >= nsrc)
      throw DataError(csv.where() + ": src " + std::to_string(s) + " of relation '" + rel + "' out of range for type '" +
                      src_name + "' (" + std::to_string(nsrc) + " nodes)");
    if (d < 0 || d >= ndst)
      throw DataError(csv.where() + ": dst " + std::to_string(d) + " of relation '" + rel + "' out of range for type '" +
                      dst_name + "' (" + std::to_string(ndst) + " nodes)");
    out.emplace_back(s, d);
  }
  return out;
}

template <typename T>
T field(const json& obj, const char* key, const std::string& context) {
  if (!obj.contains(key)) throw DataError(context + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(context + ": key '" + key + "' has the wrong type");
  }
}

}  // namespace

HeteroGraph load_dataset(const fs::path& manifest_path) {
  fs::path manifest = fs::is_directory(manifest_path) ? manifest_path / "manifest.json" : manifest_path;
  const fs::path root = manifest.parent_path();
  std::ifstream in(manifest);
  if (!in) throw DataError("missing file: " + manifest.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  const std::string ctx = manifest.string();

  NetworkSchema schema;
  std::vector<Matrix> features;
  for (const auto& t : field<json>(m, "node_types", ctx)) {
    const auto name = field<std::string>(t, "name", ctx + " node_types");
    const auto dim = field<Index>(t, "feature_dim", ctx + " node type '" + name + "'");
    if (dim < 1) throw DataError(ctx + ": node type '" + name + "' has feature_dim " + std::to_string(dim) + ", must be >= 1");
    if (schema.find_type(name)) throw DataError(ctx + ": duplicate node type '" + name + "'");
    schema.add_node_type(name);
    features.push_back(read_features(root / field<std::string>(t, "features", ctx + " node type '" + name + "'"), dim, name));
  }

  // Relations are created in pairs; edges from either side land on the pair.
  struct Pending {
    std::string name, inverse, src, dst;
    std::optional<std::string> edges;
  };
  std::vector<Pending> declared;
  for (const auto& r : field<json>(m, "relations", ctx)) {
    Pending p;
    p.name = field<std::string>(r, "name", ctx + " relations");
    const std::string rctx = ctx + " relation '" + p.name + "'";
    if (!r.contains("inverse")) throw DataError(rctx + ": no inverse relation declared");
    p.inverse = field<std::string>(r, "inverse", rctx);
    p.src = field<std::string>(r, "src", rctx);
    p.dst = field<std::string>(r, "dst", rctx);
    if (r.contains("edges")) p.edges = field<std::string>(r, "edges", rctx);
    declared.push_back(std::move(p));
  }
  std::map<std::string, const Pending*> by_name;
  for (const auto& p : declared)
    if (!by_name.emplace(p.name, &p).second) throw DataError(ctx + ": duplicate relation '" + p.name + "'");

  std::vector<std::pair<Index, const Pending*>> edge_sources;
  for (const auto& p : declared) {
    const std::string rctx = ctx + " relation '" + p.name + "'";
    auto src = schema.find_type(p.src);
    auto dst = schema.find_type(p.dst);
    if (!src || !dst) throw DataError(rctx + ": unknown endpoint type");
    if (auto existing = schema.find_relation(p.name)) {
      const Relation& rel = schema.relation(*existing);
      if (rel.src_type != *src || rel.dst_type != *dst || schema.relation(rel.inverse).name != p.inverse)
        throw DataError(rctx + ": declaration disagrees with its inverse '" + p.inverse + "'");
      edge_sources.emplace_back(*existing, &p);
      continue;
    }
    if (p.inverse == p.name) throw DataError(rctx + ": a relation cannot be its own inverse");
    if (auto it = by_name.find(p.inverse); it != by_name.end() && it->second->inverse != p.name)
      throw DataError(rctx + ": inverse '" + p.inverse + "' names a different inverse");
    auto [fwd, bwd] = schema.add_relation_pair(p.name, p.inverse, *src, *dst);
    (void)bwd;
    edge_sources.emplace_back(fwd, &p);
  }
  schema.validate();

  std::vector<EdgeList> edges(static_cast<std::size_t>(schema.num_relations()));
  for (const auto& [rid, p] : edge_sources) {
    if (!p->edges) continue;
    const Relation& rel = schema.relation(rid);
    auto list = read_edges(root / *p->edges, rel.name, features[rel.src_type].rows(), features[rel.dst_type].rows(),
                           schema.type(rel.src_type).name, schema.type(rel.dst_type).name);
    auto& dst = edges[static_cast<std::size_t>(rid)];
    dst.insert(dst.end(), list.begin(), list.end());
  }

  std::optional<TargetLabels> labels;
  if (m.contains("target")) {
    const json& t = m.at("target");
    const std::string tctx = ctx + " target";
    const auto type_name = field<std::string>(t, "type", tctx);
    auto type = schema.find_type(type_name);
    if (!type) throw DataError(tctx + ": unknown type '" + type_name + "'");
    TargetLabels tl;
    tl.type = *type;
    tl.num_classes = field<Index>(t, "num_classes", tctx);
    if (tl.num_classes < 1) throw DataError(tctx + ": num_classes must be >= 1");
    tl.labels.assign(static_cast<std::size_t>(features[*type].rows()), -1);
    CsvReader csv(root / field<std::string>(t, "labels", tctx));
    csv.expect_header({"id", "label"});
    std::vector<std::string_view> f;
    std::string buf;
    while (csv.next(f, buf)) {
      if (f.size() != 2) throw DataError(csv.where() + ": expected 'id,label'");
      Index id = csv.parse<Index>(f[0], "node id");
      int label = csv.parse<int>(f[1], "label");
      if (id < 0 || id >= static_cast<Index>(tl.labels.size()))
        throw DataError(csv.where() + ": node " + std::to_string(id) + " out of range for type '" + type_name + "'");
      if (label < 0 || label >= tl.num_classes)
        throw DataError(csv.where() + ": unknown class index " + std::to_string(label) + " (num_classes " +
                        std::to_string(tl.num_classes) + ")");
      tl.labels[id] = label;
    }
    labels = std::move(tl);
  }
  return build_graph(std::move(schema), std::move(features), edges, std::move(labels));
}

void save_dataset(const HeteroGraph& graph, const fs::path& dir) {
  graph.validate();
  fs::create_directories(dir);
  json m;
  m["format"] = "vnhgcn-dataset";
  m["version"] = 1;
  m["node_types"] = json::array();
  for (const auto& t : graph.schema.node_types()) {
    const Matrix& x = graph.features[t.index];
    const std::string file = t.name + ".csv";
    m["node_types"].push_back({{"name", t.name}, {"feature_dim", x.cols()}, {"features", file}});
    std::string out = "id";
    for (Index k = 0; k < x.cols(); ++k) out += ",f" + std::to_string(k);
    out += "\n";
    for (Index i = 0; i < x.rows(); ++i) {
      out += std::to_string(i);
      for (Index k = 0; k < x.cols(); ++k) {
        out += ",";
        append_double(out, x(i, k));
      }
      out += "\n";
    }
    write_file_atomic(dir / file, out);
  }
  m["relations"] = json::array();
  for (const auto& r : graph.schema.relations()) {
    json entry = {{"name", r.name},
                  {"src", graph.schema.type(r.src_type).name},
                  {"dst", graph.schema.type(r.dst_type).name},
                  {"inverse", graph.schema.relation(r.inverse).name}};
    if (r.index < r.inverse) {
      const std::string file = r.name + ".csv";
      entry["edges"] = file;
      const TypedAdjacency& a = graph.adj(r.index);
      std::string out = "src,dst\n";
      for (Index i = 0; i < a.rows; ++i)
        for (Index p = a.row_begin(i); p < a.row_end(i); ++p)
          out += std::to_string(a.col_idx[p]) + "," + std::to_string(i) + "\n";
      write_file_atomic(dir / file, out);
    }
    m["relations"].push_back(entry);
  }
  if (graph.target) {
    const auto& t = *graph.target;
    m["target"] = {{"type", graph.schema.type(t.type).name}, {"num_classes", t.num_classes}, {"labels", "labels.csv"}};
    std::string out = "id,label\n";
    for (std::size_t i = 0; i < t.labels.size(); ++i)
      if (t.labels[i] >= 0) out += std::to_string(i) + "," + std::to_string(t.labels[i]) + "\n";
    write_file_atomic(dir / "labels.csv", out);
  }
  write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

void SyntheticSpec::validate() const {
  if (kind == Kind::kPlantedPartition) {
    if (target_nodes < 1 || num_classes < 1 || feature_dim < 1 || bridge_feature_dim < 1)
      throw ConfigError("synthetic: sizes must be positive");
    if (feature_dim < num_classes) throw ConfigError("synthetic: feature_dim must be >= num_classes");
    if (!(separation > 0.0)) throw ConfigError("synthetic: separation must be > 0");
    if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0))
      throw ConfigError("synthetic: edge probabilities must lie in [0, 1]");
    for (Index b : bridge_nodes)
      if (b < 1) throw ConfigError("synthetic: bridge type sizes must be positive");
  } else {
    if (chain_length < 2) throw ConfigError("synthetic: chain_length must be >= 2");
    if (feature_dim < 1 || num_classes < 1) throw ConfigError("synthetic: sizes must be positive");
  }
}

namespace {

HeteroGraph planted_partition(const SyntheticSpec& spec) {
  static const char* kBridgeNames[] = {"author", "subject", "term", "venue"};
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  NetworkSchema schema;
  const Index target = schema.add_node_type("paper");
  std::vector<Matrix> features;
  TargetLabels labels{target, spec.num_classes, {}};
  Matrix x(spec.target_nodes, spec.feature_dim);
  for (Index i = 0; i < spec.target_nodes; ++i) {
    const int c = static_cast<int>(i % spec.num_classes);
    labels.labels.push_back(c);
    for (Index k = 0; k < spec.feature_dim; ++k) x(i, k) = spec.noise * gauss(rng);
    x(i, c) += spec.separation;
  }
  features.push_back(std::move(x));

  std::vector<EdgeList> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t b = 0; b < spec.bridge_nodes.size(); ++b) {
    const std::string name = b < 4 ? kBridgeNames[b] : "bridge" + std::to_string(b);
    const Index type = schema.add_node_type(name);
    const Index n = spec.bridge_nodes[b];
    Matrix bx(n, spec.bridge_feature_dim);
    for (Index i = 0; i < bx.rows(); ++i)
      for (Index k = 0; k < bx.cols(); ++k) bx(i, k) = gauss(rng);
    features.push_back(std::move(bx));
    schema.add_relation_pair(name + "-paper", "paper-" + name, type, target);
    EdgeList list;
    for (Index u = 0; u < n; ++u)
      for (Index v = 0; v < spec.target_nodes; ++v) {
        const bool same = (u % spec.num_classes) == labels.labels[v];
        if (coin(rng) < (same ? spec.p_in : spec.p_out)) list.emplace_back(u, v);
      }
    edges.push_back(std::move(list));
    edges.emplace_back();
  }
  return build_graph(std::move(schema), std::move(features), edges, std::move(labels));
}

HeteroGraph typed_chain(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  NetworkSchema schema;
  const Index a = schema.add_node_type("A");
  const Index p = schema.add_node_type("P");
  schema.add_relation_pair("A-P", "P-A", a, p);
  const Index na = (spec.chain_length + 1) / 2;
  const Index np = spec.chain_length / 2;
  std::vector<Matrix> features{Matrix(na, spec.feature_dim), Matrix(np, spec.feature_dim)};
  for (Index i = 0; i < spec.chain_length; ++i)
    for (Index k = 0; k < spec.feature_dim; ++k) features[i % 2](i / 2, k) = gauss(rng);
  EdgeList list;  // A -> P
  for (Index i = 0; i + 1 < spec.chain_length; ++i) {
    if (i % 2 == 0)
      list.emplace_back(i / 2, (i + 1) / 2);
    else
      list.emplace_back((i + 1) / 2, i / 2);
  }
  TargetLabels labels{a, spec.num_classes, {}};
  for (Index i = 0; i < na; ++i) labels.labels.push_back(static_cast<int>(i % spec.num_classes));
  return build_graph(std::move(schema), std::move(features), {list, {}}, std::move(labels));
}

}  // namespace

HeteroGraph generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  return spec.kind == SyntheticSpec::Kind::kPlantedPartition ? planted_partition(spec) : typed_chain(spec);
}

}  // namespace vnhgcn
