#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "wlflip/wl.hpp"

#include <map>
#include <set>

using namespace wlflip;

namespace {

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("round 0 colours are the node labels") {
  const LabeledGraph g(4, {{0, 1}, {1, 2}}, {2, 0, 1, 2});
  const std::vector<LabeledGraph> gs{g};
  const auto c = wl_refine(gs, 2);
  CHECK(c.colors(0, 0) == g.labels());
  CHECK(c.iterations() == 2);
}

TEST_CASE("fresh colours are consecutive in first-occurrence order") {
  const std::vector<LabeledGraph> gs{fixtures::star(3), fixtures::path(4)};
  const auto c = wl_refine(gs, 1);
  // star: centre (deg 3) first, then leaves; path: ends share the leaf colour, middles are new
  CHECK(c.colors(1, 0) == std::vector<int>{1, 2, 2, 2});
  CHECK(c.colors(1, 1) == std::vector<int>{2, 3, 3, 2});
}

TEST_CASE("C6 and two triangles never separate") {
  const std::vector<LabeledGraph> gs{fixtures::cycle(6), fixtures::two_triangles()};
  const auto c = wl_refine(gs, 4);
  for (int t = 0; t <= 4; ++t) {
    CHECK(sorted(c.colors(t, 0)) == sorted(c.colors(t, 1)));
    CHECK(wl_difference(c, 0, 1, t) == 0);
  }
}

TEST_CASE("star S3 splits into centre and leaves") {
  const std::vector<LabeledGraph> gs{fixtures::star(3)};
  CHECK(wl_refine(gs, 1).distinct(1, 0) == 2);
}

TEST_CASE("WL difference examples") {
  CHECK(wl_difference(fixtures::star(3), fixtures::path(4), 1) == 4);
  CHECK(wl_difference(fixtures::star(3), fixtures::path(4), 0) == 0);
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto g = fixtures::random_graph(rng, 6, 0.4, 2);
    for (int t = 0; t <= 3; ++t) CHECK(wl_difference(g, g, t) == 0);
  }
  CHECK(multiset_symmetric_difference({1, 1, 1, 3}, {1, 1, 2, 2}) == 4);
  CHECK(multiset_symmetric_difference({}, {4, 4}) == 2);
}

TEST_CASE("refinement never merges colour classes") {
  Rng rng(17);
  std::vector<LabeledGraph> gs;
  for (int k = 0; k < 30; ++k) gs.push_back(fixtures::random_graph(rng, 2 + static_cast<int>(uniform_below(rng, 8)), 0.35, 2));
  const auto c = wl_refine(gs, 4);
  for (std::size_t g = 0; g < gs.size(); ++g)
    for (int t = 0; t < 4; ++t) {
      const auto& a = c.colors(t, g);
      const auto& b = c.colors(t + 1, g);
      for (std::size_t u = 0; u < a.size(); ++u)
        for (std::size_t v = 0; v < a.size(); ++v)
          if (b[u] == b[v]) CHECK(a[u] == a[v]);
    }
}

TEST_CASE("subdivision ratios") {
  SUBCASE("uniform cycles are a fixed point") {
    const auto s = wl_subdivision(fixtures::dataset({fixtures::cycle(5), fixtures::cycle(8)}), 3);
    for (const double r : s.subdivision_ratios) CHECK(r == 1.0);
    CHECK(s.cumulative == 1.0);
  }
  SUBCASE("S3 alone") { CHECK(wl_subdivision(fixtures::dataset({fixtures::star(3)}), 1).subdivision_ratios[0] == 2.0); }
  SUBCASE("S3 with C4") {
    CHECK(wl_subdivision(fixtures::dataset({fixtures::star(3), fixtures::cycle(4)}), 1).subdivision_ratios[0] == 1.5);
  }
  SUBCASE("ratios at least 1 and cumulative is their product") {
    Rng rng(23);
    std::vector<LabeledGraph> gs;
    for (int k = 0; k < 25; ++k) gs.push_back(fixtures::random_graph(rng, 1 + static_cast<int>(uniform_below(rng, 9)), 0.3, 3));
    const auto s = wl_subdivision(fixtures::dataset(gs), 3);
    double product = 1.0;
    for (const double r : s.subdivision_ratios) {
      CHECK(r >= 1.0);
      product *= r;
    }
    CHECK(s.cumulative == product);
    for (const auto& counts : s.distinct_counts)
      for (std::size_t t = 1; t < counts.size(); ++t) CHECK(counts[t] >= counts[t - 1]);
  }
}

TEST_CASE("unfolding-tree encodings") {
  const LabeledGraph isolated(1, {}, {4});
  CHECK(unfolding_tree_encoding(isolated, 0, 3) == "4");
  const auto s3 = fixtures::star(3);
  CHECK(unfolding_tree_encoding(s3, 1, 2) == unfolding_tree_encoding(s3, 3, 2));
  CHECK(unfolding_tree_encoding(s3, 0, 1) != unfolding_tree_encoding(fixtures::path(4), 1, 1));
  CHECK(unfolding_tree_encoding(s3, 0, 0) == "0");
}

TEST_CASE("WL colours agree with unfolding trees on random graphs") {
  Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<LabeledGraph> gs;
    for (int k = 0; k < 3; ++k) gs.push_back(fixtures::random_graph(rng, 1 + static_cast<int>(uniform_below(rng, 8)), 0.35, 2));
    const auto c = wl_refine(gs, 3);
    for (int t = 0; t <= 3; ++t) {
      std::map<int, std::string> colour_to_tree;
      std::map<std::string, int> tree_to_colour;
      for (std::size_t g = 0; g < gs.size(); ++g)
        for (int v = 0; v < gs[g].node_count(); ++v) {
          const int col = c.colors(t, g)[static_cast<std::size_t>(v)];
          const auto tree = unfolding_tree_encoding(gs[g], v, t);
          CHECK(colour_to_tree.emplace(col, tree).first->second == tree);
          CHECK(tree_to_colour.emplace(tree, col).first->second == col);
        }
    }
  }
}
