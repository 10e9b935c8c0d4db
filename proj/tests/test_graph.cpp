#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "tempdir.hpp"
#include "wlflip/errors.hpp"
#include "wlflip/graph.hpp"

using namespace wlflip;

namespace {

void write_ds(const TempDir& d, const std::string& name, const std::string& a, const std::string& ind,
              const std::string& labels) {
  d.write(name + "_A.txt", a);
  d.write(name + "_graph_indicator.txt", ind);
  d.write(name + "_node_labels.txt", labels);
}

}  // namespace

TEST_CASE("two two-node graphs from the text format") {
  const auto ds = parse_tudataset(fixtures::data_dir() / "TINY", "TINY");
  REQUIRE(ds.size() == 2);
  for (const auto& g : ds.graphs) {
    CHECK(g.node_count() == 2);
    CHECK(g.edge_count() == 1);
  }
  CHECK(ds.label_alphabet_size == 2);
  CHECK(ds.graphs[0].labels() == std::vector<int>{0, 1});
}

TEST_CASE("empty adjacency file yields one isolated node") {
  const auto ds = parse_tudataset(fixtures::data_dir() / "SINGLE", "SINGLE");
  REQUIRE(ds.size() == 1);
  CHECK(ds.graphs[0].node_count() == 1);
  CHECK(ds.graphs[0].edge_count() == 0);
  const auto s = dataset_stats(ds);
  CHECK(s.connect_prob == 0.0);
  CHECK(s.homophily == 0.0);
}

TEST_CASE("parser errors") {
  TempDir d;
  SUBCASE("missing files") { CHECK_THROWS_AS(parse_tudataset(d.path, "NOPE"), LoadError); }
  SUBCASE("indicator not contiguous") {
    write_ds(d, "X", "", "1\n3\n", "0\n0\n");
    CHECK_THROWS_AS(parse_tudataset(d.path, "X"), FormatError);
  }
  SUBCASE("indicator decreasing") {
    write_ds(d, "X", "", "1\n2\n1\n", "0\n0\n0\n");
    CHECK_THROWS_AS(parse_tudataset(d.path, "X"), FormatError);
  }
  SUBCASE("edge across graphs") {
    write_ds(d, "X", "1, 2\n2, 1\n", "1\n2\n", "0\n0\n");
    CHECK_THROWS_AS(parse_tudataset(d.path, "X"), FormatError);
  }
  SUBCASE("node id out of range") {
    write_ds(d, "X", "1, 5\n", "1\n1\n", "0\n0\n");
    CHECK_THROWS_AS(parse_tudataset(d.path, "X"), FormatError);
  }
  SUBCASE("self-loop") {
    write_ds(d, "X", "1, 1\n", "1\n1\n", "0\n0\n");
    CHECK_THROWS_AS(parse_tudataset(d.path, "X"), FormatError);
  }
  SUBCASE("label count mismatch") {
    write_ds(d, "X", "", "1\n1\n", "0\n");
    CHECK_THROWS_AS(parse_tudataset(d.path, "X"), FormatError);
  }
  SUBCASE("garbage token carries the line number") {
    write_ds(d, "X", "1, 2\n2, x\n", "1\n1\n", "0\n0\n");
    try {
      parse_tudataset(d.path, "X");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line == 2);
    }
  }
}

TEST_CASE("single-direction and duplicate entries collapse to one undirected edge") {
  TempDir d;
  write_ds(d, "X", "1 2\n1 2\n2 1\n", "1\n1\n", "5\n9\n");
  const auto ds = parse_tudataset(d.path, "X");
  CHECK(ds.graphs[0].edge_count() == 1);
  // raw labels 5 and 9 become dense ids 0 and 1
  CHECK(ds.graphs[0].labels() == std::vector<int>{0, 1});
  CHECK(ds.raw_labels == std::vector<long long>{5, 9});
}

TEST_CASE("degree labels replace node labels") {
  TempDir d;
  d.write("X_A.txt", "1,2\n2,1\n2,3\n3,2\n");
  d.write("X_graph_indicator.txt", "1\n1\n1\n");
  const auto ds = parse_tudataset(d.path, "X", ParseOptions{true});
  CHECK(ds.label_source == LabelSource::Degree);
  CHECK(ds.label_alphabet_size == 2);
  CHECK(ds.graphs[0].label(0) == ds.graphs[0].label(2));
  CHECK(ds.graphs[0].label(0) != ds.graphs[0].label(1));
}

TEST_CASE("write then parse reproduces the dataset") {
  const auto ds = parse_tudataset(fixtures::data_dir() / "DESK", "DESK");
  TempDir d;
  write_tudataset(ds, d.path);
  const auto back = parse_tudataset(d.path, ds.name);
  REQUIRE(back.size() == ds.size());
  for (std::size_t g = 0; g < ds.size(); ++g) {
    CHECK(back.graphs[g].edges() == ds.graphs[g].edges());
    CHECK(back.graphs[g].labels() == ds.graphs[g].labels());
  }
  CHECK(back.raw_labels == ds.raw_labels);
}

TEST_CASE("graph construction invariants") {
  CHECK_THROWS_AS(LabeledGraph(2, {{0, 2}}, {0, 0}), ShapeError);
  CHECK_THROWS_AS(LabeledGraph(2, {{1, 1}}, {0, 0}), ShapeError);
  CHECK_THROWS_AS(LabeledGraph(2, {{0, 1}, {1, 0}}, {0, 0}), ShapeError);
  CHECK_THROWS_AS(LabeledGraph(2, {}, {0}), ShapeError);
  const LabeledGraph g(3, {{2, 0}, {1, 0}}, {0, 1, 0});
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
  CHECK(g.neighbors(0) == std::vector<int>{1, 2});
  CHECK(g.neighbors(2) == std::vector<int>{0});
  CHECK(g.max_degree() == 2);
}

TEST_CASE("one-hot encoding") {
  auto ds = fixtures::dataset({LabeledGraph(3, {}, {0, 1, 0})});
  ds = one_hot_encode(ds);
  const auto& x = ds.graphs[0].features();
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 2);
  CHECK(x(0, 0) == 1.0f);
  CHECK(x(0, 1) == 0.0f);
  CHECK(x(1, 0) == 0.0f);
  CHECK(x(1, 1) == 1.0f);
  CHECK(x(2, 0) == 1.0f);

  auto single = one_hot_encode(fixtures::dataset({fixtures::path(3)}));
  CHECK(single.graphs[0].features().cols() == 1);
  CHECK((single.graphs[0].features().array() == 1.0f).all());

  Matrix32 wrong(2, 1);
  auto g = fixtures::path(3);
  CHECK_THROWS_AS(g.set_features(wrong), ShapeError);
}

TEST_CASE("homophily and connection probability examples") {
  const LabeledGraph triangle(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 1});
  CHECK(homophily_ratio(triangle) == doctest::Approx(1.0 / 3.0));
  CHECK(dataset_stats(fixtures::dataset({triangle})).connect_prob == doctest::Approx(1.0));

  const LabeledGraph pair(2, {{0, 1}}, {0, 0});
  CHECK(homophily_ratio(pair) == 1.0);
  CHECK(dataset_stats(fixtures::dataset({pair})).connect_prob == 1.0);

  const LabeledGraph aba(3, {{0, 1}, {1, 2}}, {0, 1, 0});
  CHECK(homophily_ratio(aba) == 0.0);
  CHECK(dataset_stats(fixtures::dataset({aba})).connect_prob == doctest::Approx(2.0 / 3.0));

  CHECK(homophily_ratio(LabeledGraph(3, {}, {0, 0, 0})) == 0.0);
}

TEST_CASE("dataset statistics invariants on random datasets") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LabeledGraph> graphs;
    const int count = 1 + static_cast<int>(uniform_below(rng, 6));
    int max_deg = 0;
    double edges = 0;
    for (int k = 0; k < count; ++k) {
      graphs.push_back(fixtures::random_graph(rng, 1 + static_cast<int>(uniform_below(rng, 9)), 0.4, 3));
      max_deg = std::max(max_deg, graphs.back().max_degree());
      edges += graphs.back().edge_count();
    }
    const auto s = dataset_stats(fixtures::dataset(graphs));
    CHECK(s.homophily >= 0.0);
    CHECK(s.homophily <= 1.0);
    CHECK(s.max_degree == max_deg);
    CHECK(s.avg_edges == doctest::Approx(edges / count));
    CHECK(s.connect_prob <= count + 1e-12);
  }
  // complete graphs reach the P_D ceiling
  const auto k4 = LabeledGraph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {0, 0, 0, 0});
  CHECK(dataset_stats(fixtures::dataset({k4, k4})).connect_prob == doctest::Approx(2.0));
}

TEST_CASE("permuting a graph preserves structure") {
  Rng rng(3);
  const auto g = fixtures::random_graph(rng, 7, 0.5, 2);
  const auto perm = fixtures::random_permutation(rng, 7);
  const auto h = g.permuted(perm);
  CHECK(h.edge_count() == g.edge_count());
  for (int v = 0; v < 7; ++v) {
    CHECK(h.label(perm[static_cast<std::size_t>(v)]) == g.label(v));
    CHECK(h.degree(perm[static_cast<std::size_t>(v)]) == g.degree(v));
  }
}
