#include "wlflip/graph.hpp"

#include "wlflip/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

namespace wlflip {

LabeledGraph::LabeledGraph(int node_count, std::vector<Edge> edges, std::vector<int> node_labels)
    : node_count_(node_count), labels_(std::move(node_labels)) {
  if (node_count < 0) throw ShapeError("negative node count");
  if (static_cast<int>(labels_.size()) != node_count)
    throw ShapeError("label array length " + std::to_string(labels_.size()) +
                     " does not match node count " + std::to_string(node_count));
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw ShapeError("edge endpoint out of range");
    if (u == v) throw ShapeError("self-loop on node " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw ShapeError("duplicate edge");
  edges_ = std::move(edges);
  adjacency_.assign(static_cast<std::size_t>(node_count), {});
  for (const auto& [u, v] : edges_) {
    adjacency_[static_cast<std::size_t>(u)].push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

int LabeledGraph::max_degree() const {
  int d = 0;
  for (const auto& nbrs : adjacency_) d = std::max(d, static_cast<int>(nbrs.size()));
  return d;
}

void LabeledGraph::set_features(Matrix32 features) {
  if (features.rows() != node_count_)
    throw ShapeError("feature rows " + std::to_string(features.rows()) + " != node count " +
                     std::to_string(node_count_));
  features_ = std::move(features);
}

LabeledGraph LabeledGraph::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != node_count_) throw ShapeError("permutation size mismatch");
  std::vector<int> labels(labels_.size());
  for (int v = 0; v < node_count_; ++v) labels[static_cast<std::size_t>(perm[v])] = label(v);
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const auto& [u, v] : edges_) edges.emplace_back(perm[u], perm[v]);
  LabeledGraph out(node_count_, std::move(edges), std::move(labels));
  if (features_) {
    Matrix32 f(features_->rows(), features_->cols());
    for (int v = 0; v < node_count_; ++v) f.row(perm[v]) = features_->row(v);
    out.set_features(std::move(f));
  }
  return out;
}

const char* to_string(LabelSource source) {
  return source == LabelSource::Degree ? "degree" : "node_labels";
}

LabelSource parse_label_source(const std::string& s) {
  if (s == "degree") return LabelSource::Degree;
  if (s == "node_labels") return LabelSource::NodeLabels;
  throw ConfigError("unknown label source '" + s + "'");
}

namespace {

// Splits a line on commas and whitespace and parses every token as an integer.
bool parse_ints(const std::string& line, std::vector<long long>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    long long value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{}) return false;
    out.push_back(value);
    p = next;
  }
  return true;
}

struct LineFile {
  std::filesystem::path path;
  std::vector<std::vector<long long>> rows;
  std::vector<std::size_t> line_numbers;
};

LineFile read_int_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open required file " + path.string());
  LineFile file{path, {}, {}};
  std::string line;
  std::vector<long long> values;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!parse_ints(line, values))
      throw FormatError(path.filename().string(), n, "not an integer list: '" + line + "'");
    if (values.empty()) continue;
    file.rows.push_back(values);
    file.line_numbers.push_back(n);
  }
  return file;
}

std::vector<long long> read_column(const std::filesystem::path& path) {
  const auto file = read_int_lines(path);
  std::vector<long long> out;
  out.reserve(file.rows.size());
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    if (file.rows[r].size() != 1)
      throw FormatError(path.filename().string(), file.line_numbers[r], "expected one value");
    out.push_back(file.rows[r][0]);
  }
  return out;
}

}  // namespace

GraphDataset parse_tudataset(const std::filesystem::path& directory, const std::string& name,
                             const ParseOptions& options) {
  const auto file_of = [&](const char* suffix) { return directory / (name + suffix); };
  const auto indicator_path = file_of("_graph_indicator.txt");
  const auto edges_path = file_of("_A.txt");
  const auto labels_path = file_of("_node_labels.txt");
  const auto graph_labels_path = file_of("_graph_labels.txt");

  for (const auto& p : {edges_path, indicator_path})
    if (!std::filesystem::exists(p)) throw LoadError("missing required file " + p.string());
  if (!options.degree_labels && !std::filesystem::exists(labels_path))
    throw LoadError("missing required file " + labels_path.string());

  const auto indicator = read_column(indicator_path);
  const auto node_total = static_cast<long long>(indicator.size());

  // Graph ids must start at 1 and increase by at most one per line.
  std::vector<int> graph_of(indicator.size());
  std::vector<int> first_node;  // 0-based global id of each graph's first node
  long long current = 0;
  for (std::size_t n = 0; n < indicator.size(); ++n) {
    const long long g = indicator[n];
    if (g == current + 1) {
      first_node.push_back(static_cast<int>(n));
      current = g;
    } else if (g != current) {
      throw FormatError(indicator_path.filename().string(), n + 1,
                        "graph indicator must be non-decreasing and contiguous (got " +
                            std::to_string(g) + " after " + std::to_string(current) + ")");
    }
    graph_of[n] = static_cast<int>(g - 1);
  }
  const auto graph_count = first_node.size();
  std::vector<int> sizes(graph_count, 0);
  for (const int g : graph_of) ++sizes[static_cast<std::size_t>(g)];

  std::vector<std::vector<Edge>> edges(graph_count);
  {
    const auto file = read_int_lines(edges_path);
    const auto fname = edges_path.filename().string();
    std::vector<std::vector<Edge>> directed(graph_count);
    for (std::size_t r = 0; r < file.rows.size(); ++r) {
      const auto& row = file.rows[r];
      const auto line = file.line_numbers[r];
      if (row.size() != 2) throw FormatError(fname, line, "expected 'i, j'");
      for (const auto id : row)
        if (id < 1 || id > node_total)
          throw FormatError(fname, line, "node id " + std::to_string(id) + " out of range [1, " +
                                             std::to_string(node_total) + "]");
      const auto a = static_cast<std::size_t>(row[0] - 1);
      const auto b = static_cast<std::size_t>(row[1] - 1);
      if (graph_of[a] != graph_of[b])
        throw FormatError(fname, line, "edge crosses graph boundary");
      if (a == b) throw FormatError(fname, line, "self-loop");
      const auto g = static_cast<std::size_t>(graph_of[a]);
      const int base = first_node[g];
      int u = static_cast<int>(a) - base;
      int v = static_cast<int>(b) - base;
      if (u > v) std::swap(u, v);
      directed[g].emplace_back(u, v);
    }
    for (std::size_t g = 0; g < graph_count; ++g) {
      auto& list = directed[g];
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      edges[g] = std::move(list);
    }
  }

  std::vector<long long> raw;
  if (options.degree_labels) {
    raw.assign(indicator.size(), 0);
    for (std::size_t g = 0; g < graph_count; ++g)
      for (const auto& [u, v] : edges[g]) {
        ++raw[static_cast<std::size_t>(first_node[g] + u)];
        ++raw[static_cast<std::size_t>(first_node[g] + v)];
      }
  } else {
    raw = read_column(labels_path);
    if (raw.size() != indicator.size())
      throw FormatError(labels_path.filename().string(), raw.size(),
                        "node label count " + std::to_string(raw.size()) +
                            " does not match graph indicator count " +
                            std::to_string(indicator.size()));
  }

  GraphDataset dataset;
  dataset.name = name;
  dataset.label_source = options.degree_labels ? LabelSource::Degree : LabelSource::NodeLabels;
  std::map<long long, int> dense;
  for (const auto value : raw) dense.emplace(value, 0);
  for (auto& [value, id] : dense) {
    id = static_cast<int>(dataset.raw_labels.size());
    dataset.raw_labels.push_back(value);
  }
  dataset.label_alphabet_size = static_cast<int>(dense.size());

  dataset.graphs.reserve(graph_count);
  for (std::size_t g = 0; g < graph_count; ++g) {
    const int n = sizes[g];
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      labels[static_cast<std::size_t>(v)] = dense.at(raw[static_cast<std::size_t>(first_node[g] + v)]);
    dataset.graphs.emplace_back(n, std::move(edges[g]), std::move(labels));
  }

  if (std::filesystem::exists(graph_labels_path)) {
    const auto labels = read_column(graph_labels_path);
    if (labels.size() != graph_count)
      throw FormatError(graph_labels_path.filename().string(), labels.size(),
                        "graph label count does not match graph count");
    dataset.class_labels.assign(labels.begin(), labels.end());
  }
  return dataset;
}

void write_tudataset(const GraphDataset& dataset, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const auto open = [&](const char* suffix) {
    std::ofstream out(directory / (dataset.name + suffix));
    if (!out) throw LoadError("cannot write " + (directory / (dataset.name + suffix)).string());
    return out;
  };
  auto a = open("_A.txt");
  auto ind = open("_graph_indicator.txt");
  auto lab = open("_node_labels.txt");
  long long base = 1;
  for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
    const auto& graph = dataset.graphs[g];
    for (const auto& [u, v] : graph.edges()) {
      a << base + u << ", " << base + v << '\n';
      a << base + v << ", " << base + u << '\n';
    }
    for (int v = 0; v < graph.node_count(); ++v) {
      ind << g + 1 << '\n';
      const auto id = static_cast<std::size_t>(graph.label(v));
      lab << (id < dataset.raw_labels.size() ? dataset.raw_labels[id] : static_cast<long long>(id))
          << '\n';
    }
    base += graph.node_count();
  }
  if (!dataset.class_labels.empty()) {
    auto gl = open("_graph_labels.txt");
    for (const int c : dataset.class_labels) gl << c << '\n';
  }
}

GraphDataset one_hot_encode(GraphDataset dataset) {
  const int g = dataset.label_alphabet_size;
  for (auto& graph : dataset.graphs) {
    Matrix32 x = Matrix32::Zero(graph.node_count(), g);
    for (int v = 0; v < graph.node_count(); ++v) {
      const int l = graph.label(v);
      if (l < 0 || l >= g)
        throw ShapeError("label id " + std::to_string(l) + " outside alphabet of size " +
                         std::to_string(g));
      x(v, l) = 1.0f;
    }
    graph.set_features(std::move(x));
  }
  return dataset;
}

double homophily_ratio(const LabeledGraph& graph) {
  if (graph.edge_count() == 0) return 0.0;
  int same = 0;
  for (const auto& [u, v] : graph.edges())
    if (graph.label(u) == graph.label(v)) ++same;
  return static_cast<double>(same) / graph.edge_count();
}

DatasetStats dataset_stats(const GraphDataset& dataset) {
  DatasetStats s;
  s.graph_count = static_cast<int>(dataset.size());
  s.label_count = dataset.label_alphabet_size;
  if (dataset.graphs.empty()) return s;
  double nodes = 0, edges = 0, homophily = 0, connect = 0;
  for (const auto& g : dataset.graphs) {
    const double n = g.node_count();
    nodes += n;
    edges += g.edge_count();
    homophily += homophily_ratio(g);
    const double pairs = n * (n - 1) / 2;
    if (pairs > 0) connect += g.edge_count() / pairs;
    s.max_degree = std::max(s.max_degree, g.max_degree());
  }
  const double count = static_cast<double>(dataset.size());
  s.avg_nodes = nodes / count;
  s.avg_edges = edges / count;
  s.homophily = homophily / count;
  s.connect_prob = connect;
  return s;
}

}  // namespace wlflip
