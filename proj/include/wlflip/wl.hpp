#pragma once

#include "wlflip/graph.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wlflip {

/// Joint 1-WL colouring of a list of graphs. `per_iteration[t][g][v]` is the
/// colour of node v of graph g after t rounds; round 0 is the node labels.
/// One dictionary is shared by all graphs and all rounds, so colours are
/// comparable across graphs and never reused between rounds.
struct WLColoring {
  using Signature = std::pair<int, std::vector<int>>;  // (own colour, sorted neighbour colours)

  std::vector<std::vector<std::vector<int>>> per_iteration;
  std::map<Signature, int> dictionary;

  int iterations() const { return static_cast<int>(per_iteration.size()) - 1; }
  const std::vector<int>& colors(int t, std::size_t graph) const { return per_iteration[static_cast<std::size_t>(t)][graph]; }
  int distinct(int t, std::size_t graph) const;
};

struct WLStats {
  /// distinct_counts[g][t] for t = 0..k.
  std::vector<std::vector<int>> distinct_counts;
  /// subdivision_ratios[t-1] = mean over graphs of |C^t| / |C^{t-1}|, t = 1..k.
  std::vector<double> subdivision_ratios;
  double cumulative = 1.0;
};

/// Refines all graphs jointly for exactly `iterations` rounds. Fresh colours
/// are consecutive integers in first-occurrence order (graph order, then node
/// order), starting after the largest input label.
WLColoring wl_refine(std::span<const LabeledGraph> graphs, int iterations);

/// Size of the multiset symmetric difference of two colour multisets.
int multiset_symmetric_difference(std::vector<int> a, std::vector<int> b);

/// WL difference of graphs `g` and `h` inside an existing joint colouring.
int wl_difference(const WLColoring& coloring, std::size_t g, std::size_t h, int t);

/// WL difference of two graphs refined jointly.
int wl_difference(const LabeledGraph& g, const LabeledGraph& h, int t);

WLStats wl_subdivision(const WLColoring& coloring);
WLStats wl_subdivision(const GraphDataset& dataset, int k);

/// Canonical string of the height-t unfolding tree rooted at v. Exponential
/// in t; intended as a test oracle on small graphs.
std::string unfolding_tree_encoding(const LabeledGraph& graph, int v, int t);

}  // namespace wlflip
