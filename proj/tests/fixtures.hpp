#pragma once

// Small graph builders shared by the unit tests and the acceptance suite.

#include "wlflip/graph.hpp"
#include "wlflip/seed.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fixtures {

using wlflip::Edge;
using wlflip::LabeledGraph;

inline std::filesystem::path data_dir() { return WLFLIP_TEST_DATA; }

inline LabeledGraph uniform(int n, std::vector<Edge> edges) {
  return LabeledGraph(n, std::move(edges), std::vector<int>(static_cast<std::size_t>(n), 0));
}

/// Star with `leaves` leaves; node 0 is the centre.
inline LabeledGraph star(int leaves) {
  std::vector<Edge> e;
  for (int v = 1; v <= leaves; ++v) e.push_back({0, v});
  return uniform(leaves + 1, e);
}

inline LabeledGraph path(int n) {
  std::vector<Edge> e;
  for (int v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return uniform(n, e);
}

inline LabeledGraph cycle(int n) {
  std::vector<Edge> e;
  for (int v = 0; v < n; ++v) e.push_back({v, (v + 1) % n});
  return uniform(n, e);
}

inline LabeledGraph two_triangles() { return uniform(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}); }

inline wlflip::GraphDataset dataset(std::vector<LabeledGraph> graphs, std::string name = "fixture") {
  wlflip::GraphDataset d;
  d.name = std::move(name);
  int g = 0;
  for (const auto& gr : graphs)
    for (const int l : gr.labels()) g = std::max(g, l + 1);
  d.label_alphabet_size = g;
  for (int l = 0; l < g; ++l) d.raw_labels.push_back(l);
  d.graphs = std::move(graphs);
  return d;
}

/// Erdos-Renyi style graph with labels in [0, labels).
inline LabeledGraph random_graph(wlflip::Rng& rng, int n, double p, int labels) {
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (wlflip::uniform_unit(rng) < p) e.push_back({u, v});
  std::vector<int> l(static_cast<std::size_t>(n));
  for (auto& x : l) x = static_cast<int>(wlflip::uniform_below(rng, static_cast<std::uint64_t>(labels)));
  return LabeledGraph(n, e, l);
}

inline std::vector<int> random_permutation(wlflip::Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(p[static_cast<std::size_t>(i)],
              p[static_cast<std::size_t>(wlflip::uniform_below(rng, static_cast<std::uint64_t>(i + 1)))]);
  return p;
}

}  // namespace fixtures
