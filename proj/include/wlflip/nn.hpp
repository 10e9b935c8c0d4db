#pragma once

#include "wlflip/dense.hpp"
#include "wlflip/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace wlflip {

enum class Architecture { DS, GIN, GCN };
enum class Activation { ReLU, Sigmoid, SiLU };

const char* to_string(Architecture a);
const char* to_string(Activation a);
Architecture parse_architecture(const std::string& s);
Activation parse_activation(const std::string& s);

/// Only Sigmoid is strictly monotone; ReLU and SiLU are reported as
/// non-injective.
constexpr bool is_injective(Activation a) { return a == Activation::Sigmoid; }

template <typename Scalar>
Scalar activate(Activation a, Scalar x) {
  switch (a) {
    case Activation::ReLU:
      if (std::isnan(x)) return x;
      return x > Scalar(0) ? x : Scalar(0);
    case Activation::Sigmoid:
      return Scalar(1) / (Scalar(1) + std::exp(-x));
    case Activation::SiLU:
      return x / (Scalar(1) + std::exp(-x));
  }
  return x;
}

/// One sigma(W x) stage; W is (outputs x inputs). No bias.
struct DenseLayer {
  Matrix32 weight;
  Activation activation = Activation::ReLU;

  int inputs() const { return static_cast<int>(weight.cols()); }
  int outputs() const { return static_cast<int>(weight.rows()); }
};

struct MessagePassingLayer {
  float epsilon = 0.0f;  // GIN self weight is (1 + epsilon)
  std::vector<DenseLayer> mlp;
};

/// 1-based address of W^(j,i): message-passing layer j, MLP stage i.
struct LayerRef {
  int j = 1;
  int i = 1;
  auto operator<=>(const LayerRef&) const = default;
};

struct ModelConfig {
  Architecture architecture = Architecture::GIN;
  Activation activation = Activation::ReLU;
  int input_dim = 1;
  int hidden = 64;
  int depth = 3;      // message-passing layers k
  int mlp_depth = 2;  // sigma o W stages per MLP (GCN always uses 1)
  float gin_epsilon = 0.0f;
  std::uint64_t seed = 0;
};

struct GnnModel {
  ModelConfig config;
  std::vector<MessagePassingLayer> layers;

  int depth() const { return static_cast<int>(layers.size()); }
  int stages(int j) const;
  DenseLayer& dense(LayerRef ref);
  const DenseLayer& dense(LayerRef ref) const;
  /// Every (j, i) in forward order.
  std::vector<LayerRef> layer_refs() const;
  int output_dim() const;
  /// Throws ShapeError unless widths chain from input_dim to output.
  void validate() const;
};

/// Builds a model and draws every weight i.i.d. from U(-sqrt(1/m), sqrt(1/m)),
/// m the stage's output width. Draw order: j ascending, i ascending, then
/// row-major, one mt19937_64 draw per weight.
GnnModel init_model(const ModelConfig& config);

struct ForwardTrace {
  std::vector<Matrix32> hidden;      // H^(0) = X, ..., H^(k)
  std::vector<Matrix32> aggregates;  // Z^(1), ..., Z^(k)
  /// stage_outputs[j-1][i-1] = output of sigma o W^(j,i); the last stage is H^(j).
  std::vector<std::vector<Matrix32>> stage_outputs;
  RowVector32 graph_embedding;  // canonical-order sum of H^(k) rows

  const Matrix32& aggregate(int j) const { return aggregates[static_cast<std::size_t>(j - 1)]; }
  const Matrix32& stage_input(LayerRef ref) const;
  const Matrix32& stage_output(LayerRef ref) const;
};

/// Aggregation step of layer j (1-based) applied to node rows `h`.
Matrix32 aggregate(const GnnModel& model, int j, const LabeledGraph& graph, const Matrix32& h);

/// sigma(W x) for every row of `input`.
Matrix32 apply_dense(const DenseLayer& layer, const Matrix32& input);

ForwardTrace forward(const GnnModel& model, const LabeledGraph& graph);
std::vector<ForwardTrace> forward_all(const GnnModel& model, const GraphDataset& dataset);

struct NodeRef {
  int graph = 0;
  int node = 0;
  auto operator<=>(const NodeRef&) const = default;
};

struct LayerRows {
  Matrix32 rows;
  std::vector<NodeRef> provenance;
};

/// Inputs seen by W^(ref) over the whole dataset, in (graph, node) order.
LayerRows layer_rows(const std::vector<ForwardTrace>& traces, LayerRef ref, bool inputs);
/// Z^(j) over the dataset.
LayerRows layer_inputs(const GnnModel& model, const GraphDataset& dataset, int j);

/// Versioned little-endian binary dump; round-trips bit-exactly.
void save_model(const GnnModel& model, std::ostream& out);
GnnModel load_model(std::istream& in);
void save_model(const GnnModel& model, const std::filesystem::path& path);
GnnModel load_model(const std::filesystem::path& path);

}  // namespace wlflip
