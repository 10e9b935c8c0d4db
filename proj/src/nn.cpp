#include "wlflip/nn.hpp"

#include "wlflip/errors.hpp"
#include "wlflip/seed.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace wlflip {

const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::DS: return "DS";
    case Architecture::GIN: return "GIN";
    case Architecture::GCN: return "GCN";
  }
  return "?";
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "ReLU";
    case Activation::Sigmoid: return "Sigmoid";
    case Activation::SiLU: return "SiLU";
  }
  return "?";
}

namespace {
std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
}  // namespace

Architecture parse_architecture(const std::string& s) {
  const auto l = lower(s);
  if (l == "ds") return Architecture::DS;
  if (l == "gin") return Architecture::GIN;
  if (l == "gcn") return Architecture::GCN;
  throw ConfigError("unknown architecture '" + s + "' (expected DS, GIN or GCN)");
}

Activation parse_activation(const std::string& s) {
  const auto l = lower(s);
  if (l == "relu") return Activation::ReLU;
  if (l == "sigmoid") return Activation::Sigmoid;
  if (l == "silu") return Activation::SiLU;
  throw ConfigError("unknown activation '" + s + "' (expected ReLU, Sigmoid or SiLU)");
}

int GnnModel::stages(int j) const {
  if (j < 1 || j > depth()) throw AddressError("layer j=" + std::to_string(j) + " out of range");
  return static_cast<int>(layers[static_cast<std::size_t>(j - 1)].mlp.size());
}

DenseLayer& GnnModel::dense(LayerRef ref) {
  return const_cast<DenseLayer&>(std::as_const(*this).dense(ref));
}

const DenseLayer& GnnModel::dense(LayerRef ref) const {
  if (ref.i < 1 || ref.i > stages(ref.j))
    throw AddressError("layer (" + std::to_string(ref.j) + "," + std::to_string(ref.i) +
                       ") does not exist");
  return layers[static_cast<std::size_t>(ref.j - 1)].mlp[static_cast<std::size_t>(ref.i - 1)];
}

std::vector<LayerRef> GnnModel::layer_refs() const {
  std::vector<LayerRef> refs;
  for (int j = 1; j <= depth(); ++j)
    for (int i = 1; i <= stages(j); ++i) refs.push_back({j, i});
  return refs;
}

int GnnModel::output_dim() const {
  if (layers.empty()) return config.input_dim;
  return layers.back().mlp.back().outputs();
}

void GnnModel::validate() const {
  int width = config.input_dim;
  for (const auto ref : layer_refs()) {
    const auto& d = dense(ref);
    if (d.inputs() != width)
      throw ShapeError("W^(" + std::to_string(ref.j) + "," + std::to_string(ref.i) + ") expects " +
                       std::to_string(d.inputs()) + " inputs, previous width is " +
                       std::to_string(width));
    width = d.outputs();
  }
  if (config.architecture == Architecture::GCN)
    for (const auto& l : layers)
      if (l.mlp.size() != 1) throw ShapeError("GCN layers carry exactly one stage");
}

GnnModel init_model(const ModelConfig& config) {
  if (config.input_dim < 1 || config.hidden < 1 || config.depth < 1 || config.mlp_depth < 1)
    throw ShapeError("model dimensions must be positive");
  GnnModel model;
  model.config = config;
  Rng rng(config.seed);
  const int stages = config.architecture == Architecture::GCN ? 1 : config.mlp_depth;
  int width = config.input_dim;
  for (int j = 1; j <= config.depth; ++j) {
    MessagePassingLayer layer;
    layer.epsilon = config.architecture == Architecture::GIN ? config.gin_epsilon : 0.0f;
    for (int i = 1; i <= stages; ++i) {
      const int m = config.hidden;
      const double bound = std::sqrt(1.0 / m);
      DenseLayer d{Matrix32(m, width), config.activation};
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < width; ++c)
          d.weight(r, c) = static_cast<float>(bound * (2.0 * uniform_unit(rng) - 1.0));
      layer.mlp.push_back(std::move(d));
      width = m;
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

const Matrix32& ForwardTrace::stage_input(LayerRef ref) const {
  if (ref.i == 1) return aggregate(ref.j);
  return stage_outputs[static_cast<std::size_t>(ref.j - 1)][static_cast<std::size_t>(ref.i - 2)];
}

const Matrix32& ForwardTrace::stage_output(LayerRef ref) const {
  return stage_outputs[static_cast<std::size_t>(ref.j - 1)][static_cast<std::size_t>(ref.i - 1)];
}

Matrix32 aggregate(const GnnModel& model, int j, const LabeledGraph& graph, const Matrix32& h) {
  const auto& layer = model.layers[static_cast<std::size_t>(j - 1)];
  const Eigen::Index width = h.cols();
  Matrix32 z(h.rows(), width);
  Matrix32 operands;
  for (int v = 0; v < graph.node_count(); ++v) {
    const auto& nbrs = graph.neighbors(v);
    if (model.config.architecture == Architecture::GCN) {
      // D^-1/2 (A + I) D^-1/2 with degrees taken in A + I.
      const float inv_v = 1.0f / std::sqrt(static_cast<float>(graph.degree(v) + 1));
      operands.resize(static_cast<Eigen::Index>(nbrs.size()) + 1, width);
      operands.row(0) = h.row(v) * (inv_v * inv_v);
      for (std::size_t n = 0; n < nbrs.size(); ++n) {
        const int u = nbrs[n];
        const float inv_u = 1.0f / std::sqrt(static_cast<float>(graph.degree(u) + 1));
        operands.row(static_cast<Eigen::Index>(n) + 1) = h.row(u) * (inv_v * inv_u);
      }
      z.row(v) = canonical_row_sum(operands);
      continue;
    }
    // The self row joins the canonical multiset, so (A + I) H is summed as one
    // closed neighbourhood and equal multisets give bit-identical rows.
    const float self = 1.0f + layer.epsilon;
    operands.resize(static_cast<Eigen::Index>(nbrs.size()) + 1, width);
    operands.row(0) = h.row(v) * self;
    for (std::size_t n = 0; n < nbrs.size(); ++n) operands.row(static_cast<Eigen::Index>(n) + 1) = h.row(nbrs[n]);
    z.row(v) = canonical_row_sum(operands);
  }
  return z;
}

Matrix32 apply_dense(const DenseLayer& layer, const Matrix32& input) {
  if (input.cols() != layer.weight.cols())
    throw ShapeError("stage expects width " + std::to_string(layer.weight.cols()) + ", got " +
                     std::to_string(input.cols()));
  Matrix32 out(input.rows(), layer.weight.rows());
  for (Eigen::Index v = 0; v < input.rows(); ++v)
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      out(v, r) = activate(layer.activation, ordered_dot(layer.weight.row(r), input.row(v)));
  return out;
}

ForwardTrace forward(const GnnModel& model, const LabeledGraph& graph) {
  if (!graph.has_features()) throw ShapeError("graph has no features; one-hot encode first");
  if (graph.features().cols() != model.config.input_dim)
    throw ShapeError("feature width " + std::to_string(graph.features().cols()) +
                     " does not match model input width " + std::to_string(model.config.input_dim));
  ForwardTrace trace;
  trace.hidden.push_back(graph.features());
  for (int j = 1; j <= model.depth(); ++j) {
    trace.aggregates.push_back(aggregate(model, j, graph, trace.hidden.back()));
    std::vector<Matrix32> outs;
    const Matrix32* input = &trace.aggregates.back();
    for (const auto& stage : model.layers[static_cast<std::size_t>(j - 1)].mlp) {
      outs.push_back(apply_dense(stage, *input));
      input = &outs.back();
    }
    trace.hidden.push_back(outs.back());
    trace.stage_outputs.push_back(std::move(outs));
  }
  trace.graph_embedding = canonical_row_sum(trace.hidden.back());
  return trace;
}

std::vector<ForwardTrace> forward_all(const GnnModel& model, const GraphDataset& dataset) {
  std::vector<ForwardTrace> traces;
  traces.reserve(dataset.size());
  for (const auto& g : dataset.graphs) traces.push_back(forward(model, g));
  return traces;
}

LayerRows layer_rows(const std::vector<ForwardTrace>& traces, LayerRef ref, bool inputs) {
  LayerRows out;
  Eigen::Index total = 0, width = 0;
  for (const auto& t : traces) {
    const auto& m = inputs ? t.stage_input(ref) : t.stage_output(ref);
    total += m.rows();
    width = m.cols();
  }
  out.rows.resize(total, width);
  Eigen::Index at = 0;
  for (std::size_t g = 0; g < traces.size(); ++g) {
    const auto& m = inputs ? traces[g].stage_input(ref) : traces[g].stage_output(ref);
    out.rows.middleRows(at, m.rows()) = m;
    for (Eigen::Index v = 0; v < m.rows(); ++v)
      out.provenance.push_back({static_cast<int>(g), static_cast<int>(v)});
    at += m.rows();
  }
  return out;
}

LayerRows layer_inputs(const GnnModel& model, const GraphDataset& dataset, int j) {
  if (j < 1 || j > model.depth()) throw AddressError("layer j=" + std::to_string(j) + " out of range");
  return layer_rows(forward_all(model, dataset), {j, 1}, true);
}

namespace {

constexpr char kMagic[4] = {'W', 'L', 'F', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t x) {
  const unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                              static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t x) {
  put_u32(out, static_cast<std::uint32_t>(x));
  put_u32(out, static_cast<std::uint32_t>(x >> 32));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw LoadError("truncated model file");
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
         std::uint32_t{b[3]} << 24;
}

std::uint64_t get_u64(std::istream& in) {
  const std::uint64_t lo = get_u32(in);
  return lo | static_cast<std::uint64_t>(get_u32(in)) << 32;
}

}  // namespace

// Layout: magic, version, architecture, activation, input_dim, hidden, depth,
// mlp_depth, gin_epsilon bits, seed (u64); then per layer its epsilon bits and
// stage count, and per stage rows, cols, activation and rows*cols weight words.
void save_model(const GnnModel& model, std::ostream& out) {
  const auto& c = model.config;
  out.write(kMagic, 4);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(c.architecture));
  put_u32(out, static_cast<std::uint32_t>(c.activation));
  put_u32(out, static_cast<std::uint32_t>(c.input_dim));
  put_u32(out, static_cast<std::uint32_t>(c.hidden));
  put_u32(out, static_cast<std::uint32_t>(model.depth()));
  put_u32(out, static_cast<std::uint32_t>(c.mlp_depth));
  put_u32(out, scalar_bits(c.gin_epsilon));
  put_u64(out, c.seed);
  for (const auto& layer : model.layers) {
    put_u32(out, scalar_bits(layer.epsilon));
    put_u32(out, static_cast<std::uint32_t>(layer.mlp.size()));
    for (const auto& d : layer.mlp) {
      put_u32(out, static_cast<std::uint32_t>(d.weight.rows()));
      put_u32(out, static_cast<std::uint32_t>(d.weight.cols()));
      put_u32(out, static_cast<std::uint32_t>(d.activation));
      for (Eigen::Index r = 0; r < d.weight.rows(); ++r)
        for (Eigen::Index col = 0; col < d.weight.cols(); ++col) put_u32(out, scalar_bits(d.weight(r, col)));
    }
  }
}

GnnModel load_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw LoadError("not a model file");
  if (const auto v = get_u32(in); v != kFormatVersion)
    throw LoadError("unsupported model format version " + std::to_string(v));
  GnnModel model;
  auto& c = model.config;
  const auto arch = get_u32(in);
  const auto act = get_u32(in);
  if (arch > 2 || act > 2) throw LoadError("corrupt model header");
  c.architecture = static_cast<Architecture>(arch);
  c.activation = static_cast<Activation>(act);
  c.input_dim = static_cast<int>(get_u32(in));
  c.hidden = static_cast<int>(get_u32(in));
  c.depth = static_cast<int>(get_u32(in));
  c.mlp_depth = static_cast<int>(get_u32(in));
  c.gin_epsilon = std::bit_cast<float>(get_u32(in));
  c.seed = get_u64(in);
  for (int j = 0; j < c.depth; ++j) {
    MessagePassingLayer layer;
    layer.epsilon = std::bit_cast<float>(get_u32(in));
    const auto count = get_u32(in);
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto rows = get_u32(in);
      const auto cols = get_u32(in);
      const auto a = get_u32(in);
      if (a > 2 || rows > (1u << 20) || cols > (1u << 20)) throw LoadError("corrupt stage header");
      DenseLayer d{Matrix32(rows, cols), static_cast<Activation>(a)};
      for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t col = 0; col < cols; ++col) d.weight(r, col) = std::bit_cast<float>(get_u32(in));
      layer.mlp.push_back(std::move(d));
    }
    model.layers.push_back(std::move(layer));
  }
  model.validate();
  return model;
}

void save_model(const GnnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  save_model(model, out);
}

GnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace wlflip
