#pragma once

#include "wlflip/graph.hpp"
#include "wlflip/nn.hpp"
#include "wlflip/wl.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace wlflip {

inline constexpr int kBitWidth = 32;

/// Largest thresholded l0 distance between two observed stage inputs.
struct L0Witness {
  int d = 0;
  std::optional<std::pair<NodeRef, NodeRef>> witness;  // empty when fewer than 2 inputs
};

/// Exhaustive scan over the stage inputs of W^(layer) across the dataset.
/// Coordinates count as different when they are not within `eps`.
L0Witness max_l0_diff(const std::vector<ForwardTrace>& traces, LayerRef layer, double eps = kEpsMach);
L0Witness max_l0_diff(const GnnModel& model, const GraphDataset& dataset, LayerRef layer,
                      double eps = kEpsMach);
/// Same, restricted to u in graph `g` and v in graph `h`.
L0Witness max_l0_diff_between(const ForwardTrace& g, const ForwardTrace& h, std::size_t gi,
                              std::size_t hi, LayerRef layer, double eps = kEpsMach);

struct WLPair {
  std::size_t g = 0, h = 0;
  int e = 0;
};

/// argmax of the WL difference at iteration j over unordered pairs of equal
/// order; ties go to the lexicographically smallest (g, h). Empty when no
/// equal-order pair exists.
std::optional<WLPair> wl_max_pair(const WLColoring& coloring, std::span<const LabeledGraph> graphs, int j);
std::optional<WLPair> wl_max_pair(const GraphDataset& dataset, int j);

struct BoundInputs {
  std::int64_t d = 0;  // d_{j,i}
  std::int64_t e = 0;  // e_j
  std::int64_t m = 0;  // stage output width
  std::int64_t n = 0;  // stage input width
  int b = kBitWidth;
  bool relu = false;
};

/// d*m*b flips, or d*m for a ReLU stage (one sign bit per weight).
std::int64_t node_bound(const BoundInputs& in);
/// e*d*m*b flips, or e*d*m for a ReLU stage.
std::int64_t graph_bound(const BoundInputs& in);

/// m*b*min(2*max_degree, g) for one-hot first-layer inputs.
std::int64_t first_layer_nz(int max_degree, int g);
std::int64_t first_layer_bound(int max_degree, int g, std::int64_t m, int b = kBitWidth);

struct HomophilyBound {
  double nz_raw = 0;         // min(2 d (1-H_D)(1-P_D), g), negative when P_D > 1
  std::int64_t nz_ceil = 0;  // ceil of nz_raw, at least 0
  double flips_raw = 0;      // m * b * nz_raw
  std::int64_t flips = 0;    // m * b * nz_ceil
};

HomophilyBound homophily_bound(const DatasetStats& stats, int g, std::int64_t m, int b = kBitWidth);

enum class BoundLevel { Node, Graph };

struct FlipProbability {
  double beta = 0;            // d*m*2^b (times e for graph level)
  double log_bound = 0;       // -beta * ln(n*m), natural log
  std::optional<double> bound;  // exp(log_bound) unless it underflows
  bool degenerate = false;    // n*m <= 1
};

/// Upper bound on the probability that random flips in the last stage break
/// node- or graph-level expressivity, computed in log space.
FlipProbability random_flip_probability(const BoundInputs& in, BoundLevel level);

}  // namespace wlflip
