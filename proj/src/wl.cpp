#include "wlflip/wl.hpp"

#include <algorithm>
#include <set>

namespace wlflip {

int WLColoring::distinct(int t, std::size_t graph) const {
  const auto& c = colors(t, graph);
  return static_cast<int>(std::set<int>(c.begin(), c.end()).size());
}

WLColoring wl_refine(std::span<const LabeledGraph> graphs, int iterations) {
  WLColoring out;
  out.per_iteration.reserve(static_cast<std::size_t>(iterations) + 1);
  int next = 0;
  std::vector<std::vector<int>> current;
  current.reserve(graphs.size());
  for (const auto& g : graphs) {
    current.push_back(g.labels());
    for (const int l : g.labels()) next = std::max(next, l + 1);
  }
  out.per_iteration.push_back(current);

  std::vector<int> nbr;
  for (int t = 1; t <= iterations; ++t) {
    std::vector<std::vector<int>> refined(graphs.size());
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const auto& g = graphs[gi];
      const auto& prev = current[gi];
      auto& colors = refined[gi];
      colors.resize(prev.size());
      for (int v = 0; v < g.node_count(); ++v) {
        nbr.clear();
        for (const int u : g.neighbors(v)) nbr.push_back(prev[static_cast<std::size_t>(u)]);
        std::sort(nbr.begin(), nbr.end());
        auto [it, inserted] =
            out.dictionary.try_emplace(WLColoring::Signature{prev[static_cast<std::size_t>(v)], nbr}, next);
        if (inserted) ++next;
        colors[static_cast<std::size_t>(v)] = it->second;
      }
    }
    current = std::move(refined);
    out.per_iteration.push_back(current);
  }
  return out;
}

int multiset_symmetric_difference(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<int> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

int wl_difference(const WLColoring& coloring, std::size_t g, std::size_t h, int t) {
  return multiset_symmetric_difference(coloring.colors(t, g), coloring.colors(t, h));
}

int wl_difference(const LabeledGraph& g, const LabeledGraph& h, int t) {
  const std::vector<LabeledGraph> pair{g, h};
  return wl_difference(wl_refine(pair, t), 0, 1, t);
}

WLStats wl_subdivision(const WLColoring& coloring) {
  WLStats s;
  const int k = coloring.iterations();
  const std::size_t n = coloring.per_iteration.front().size();
  s.distinct_counts.assign(n, std::vector<int>(static_cast<std::size_t>(k) + 1, 0));
  for (std::size_t g = 0; g < n; ++g)
    for (int t = 0; t <= k; ++t) s.distinct_counts[g][static_cast<std::size_t>(t)] = coloring.distinct(t, g);
  for (int t = 1; t <= k; ++t) {
    double sum = 0;
    for (std::size_t g = 0; g < n; ++g) {
      const auto& c = s.distinct_counts[g];
      const int before = c[static_cast<std::size_t>(t - 1)];
      // An empty graph has no colours in any round.
      sum += before == 0 ? 1.0 : static_cast<double>(c[static_cast<std::size_t>(t)]) / before;
    }
    const double ratio = n == 0 ? 1.0 : sum / static_cast<double>(n);
    s.subdivision_ratios.push_back(ratio);
    s.cumulative *= ratio;
  }
  return s;
}

WLStats wl_subdivision(const GraphDataset& dataset, int k) {
  return wl_subdivision(wl_refine(dataset.graphs, k));
}

std::string unfolding_tree_encoding(const LabeledGraph& graph, int v, int t) {
  std::string out = std::to_string(graph.label(v));
  if (t == 0 || graph.degree(v) == 0) return out;
  std::vector<std::string> children;
  children.reserve(graph.neighbors(v).size());
  for (const int u : graph.neighbors(v)) children.push_back(unfolding_tree_encoding(graph, u, t - 1));
  std::sort(children.begin(), children.end());
  out += '[';
  for (std::size_t c = 0; c < children.size(); ++c) {
    if (c) out += ',';
    out += children[c];
  }
  out += ']';
  return out;
}

}  // namespace wlflip
