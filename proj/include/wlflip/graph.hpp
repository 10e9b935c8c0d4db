#pragma once

#include "wlflip/dense.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wlflip {

using Edge = std::pair<int, int>;

/// Undirected, simple, node-labelled graph. Edges are stored once as (u, v)
/// with u < v, sorted; self-contribution is the model's business, so
/// self-loops are rejected.
class LabeledGraph {
 public:
  LabeledGraph() = default;
  LabeledGraph(int node_count, std::vector<Edge> edges, std::vector<int> node_labels);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(int v) const { return labels_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
  int max_degree() const;

  bool has_features() const { return features_.has_value(); }
  const Matrix32& features() const { return *features_; }
  void set_features(Matrix32 features);

  /// Same graph with node v renamed to perm[v].
  LabeledGraph permuted(const std::vector<int>& perm) const;

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> labels_;
  std::vector<std::vector<int>> adjacency_;
  std::optional<Matrix32> features_;
};

enum class LabelSource { NodeLabels, Degree };

struct GraphDataset {
  std::string name;
  std::vector<LabeledGraph> graphs;
  int label_alphabet_size = 0;
  std::vector<int> class_labels;  // parsed when present, unused by metrics
  LabelSource label_source = LabelSource::NodeLabels;
  /// Raw label value for each dense label id.
  std::vector<long long> raw_labels;

  std::size_t size() const { return graphs.size(); }
};

struct DatasetStats {
  int graph_count = 0;
  double avg_nodes = 0;
  double avg_edges = 0;
  double homophily = 0;     // H_D, mean of per-graph H_G
  double connect_prob = 0;  // P_D, sum of |E| / C(|V|, 2)
  int max_degree = 0;
  int label_count = 0;
};

struct ParseOptions {
  /// Use node degrees as labels (for datasets shipped without node labels).
  bool degree_labels = false;
};

/// Reads `<name>_A.txt`, `<name>_graph_indicator.txt`, `<name>_node_labels.txt`
/// and, when present, `<name>_graph_labels.txt` from `directory`.
GraphDataset parse_tudataset(const std::filesystem::path& directory, const std::string& name,
                             const ParseOptions& options = {});

/// Writes the dataset back in the same text format (both edge directions,
/// raw label values). Parsing the output reproduces the graphs.
void write_tudataset(const GraphDataset& dataset, const std::filesystem::path& directory);

/// Replaces every graph's features by one-hot rows of width g.
GraphDataset one_hot_encode(GraphDataset dataset);

/// Homophily ratio of one graph; 0 for an edgeless graph.
double homophily_ratio(const LabeledGraph& graph);

DatasetStats dataset_stats(const GraphDataset& dataset);

const char* to_string(LabelSource source);
LabelSource parse_label_source(const std::string& s);

}  // namespace wlflip
