#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "wlflip/errors.hpp"
#include "wlflip/metrics.hpp"

#include <algorithm>

using namespace wlflip;

namespace {

GnnModel model_for(int input_dim, Activation act = Activation::Sigmoid, int hidden = 8, std::uint64_t seed = 3) {
  ModelConfig c;
  c.input_dim = input_dim;
  c.hidden = hidden;
  c.activation = act;
  c.seed = seed;
  return init_model(c);
}

void zero_all(GnnModel& m) {
  for (const auto ref : m.layer_refs()) m.dense(ref).weight.setZero();
}

GraphDataset mixed() {
  Rng rng(17);
  std::vector<LabeledGraph> gs{fixtures::star(3), fixtures::path(4), fixtures::cycle(5), fixtures::two_triangles()};
  for (int k = 0; k < 6; ++k) gs.push_back(fixtures::random_graph(rng, 4 + k % 3, 0.5, 2));
  return one_hot_encode(fixtures::dataset(gs));
}

}  // namespace

TEST_CASE("greedy delta classing") {
  const double eps = 1e-3;
  Eigen::MatrixXd rows(3, 1);
  rows << 0.0, eps / 2, 1.5 * eps;
  const auto idx = delta_distinct(rows, eps);
  CHECK(idx.count() == 2);
  CHECK(idx.assignment == std::vector<int>{0, 0, 1});
  CHECK(delta_count(rows, 0.0) == 3);
  CHECK(delta_count(rows, 10.0) == 1);
}

TEST_CASE("expressivity of a zeroed model") {
  const auto ds = mixed();
  auto m = model_for(ds.label_alphabet_size, Activation::ReLU);
  zero_all(m);
  const auto r = compute_metrics(m, ds);
  CHECK(r.exp.certified_pairs > 0);
  CHECK(r.exp.distinguished_pairs == 0);
  CHECK(r.exp.value == 0.0);
  for (std::size_t j = 1; j < r.s_gnn.per_layer.size(); ++j) CHECK(r.s_gnn.per_layer[j] == 1.0);
}

TEST_CASE("no certified pair flags the denominator") {
  const auto ds = one_hot_encode(fixtures::dataset({fixtures::path(4), fixtures::path(4).permuted({2, 0, 3, 1})}));
  const auto e = expressivity(model_for(1), ds, 3);
  CHECK(e.empty_denominator);
  CHECK(e.certified_pairs == 0);
}

TEST_CASE("coloring shorter than k is rejected") {
  const auto ds = mixed();
  const auto m = model_for(ds.label_alphabet_size);
  const auto coloring = wl_refine(ds.graphs, 1);
  CHECK_THROWS_AS(expressivity(forward_all(m, ds), coloring, 3), ConfigError);
}

TEST_CASE("S3 splits into centre and leaves") {
  const auto ds = one_hot_encode(fixtures::dataset({fixtures::star(3)}));
  const auto s = gnn_subdivision(model_for(1), ds);
  REQUIRE(s.per_layer.size() == 3);
  CHECK(s.per_layer[0] == 2.0);
  CHECK(s.per_layer[1] == 1.0);
}

TEST_CASE("identity MLP keeps every aggregate") {
  const auto ds = one_hot_encode(fixtures::dataset({LabeledGraph(4, {{0, 1}, {1, 2}, {2, 3}}, {0, 1, 2, 0}), fixtures::star(2)}));
  auto m = model_for(3, Activation::ReLU, 3);
  for (const auto ref : m.layer_refs()) m.dense(ref).weight.setIdentity();
  for (int j = 1; j <= m.depth(); ++j) CHECK(unique_mapping_ratio(m, ds, j) == 1.0);
  CHECK(compute_metrics(m, ds).m_cumulative == 1.0);
}

TEST_CASE("zeroed MLP collapses every aggregate") {
  const auto ds = mixed();
  auto m = model_for(ds.label_alphabet_size);
  zero_all(m);
  const auto traces = forward_all(m, ds);
  const auto z = layer_rows(traces, {1, 1}, true);
  CHECK(unique_mapping_ratio(traces, 1) == doctest::Approx(1.0 / delta_count(z.rows)));
  CHECK_THROWS_AS(unique_mapping_ratio(m, ds, 4), AddressError);
}

TEST_CASE("metric deltas") {
  const auto ds = mixed();
  const auto m = model_for(ds.label_alphabet_size, Activation::ReLU);
  auto z = m;
  zero_all(z);
  const auto clean = compute_metrics(m, ds);
  const auto bad = compute_metrics(z, ds);
  const auto d = metric_deltas(clean, bad);
  CHECK(d.exp == doctest::Approx(clean.exp.value));
  CHECK(d.m_cumulative == doctest::Approx(clean.m_cumulative - bad.m_cumulative));
  auto other = bad;
  other.epsilon = 0.5;
  CHECK_THROWS_AS(metric_deltas(clean, other), ConfigError);
}

TEST_CASE("metrics ignore dataset order and node numbering") {
  Rng rng(8);
  const auto ds = mixed();
  auto shuffled = ds;
  std::reverse(shuffled.graphs.begin(), shuffled.graphs.end());
  for (auto& g : shuffled.graphs) g = g.permuted(fixtures::random_permutation(rng, g.node_count()));
  shuffled = one_hot_encode(shuffled);
  for (const auto act : {Activation::ReLU, Activation::Sigmoid}) {
    const auto m = model_for(ds.label_alphabet_size, act);
    const auto a = compute_metrics(m, ds);
    const auto b = compute_metrics(m, shuffled);
    CHECK(a.exp.value == b.exp.value);
    CHECK(a.exp.certified_pairs == b.exp.certified_pairs);
    CHECK(a.s_gnn.cumulative == doctest::Approx(b.s_gnn.cumulative));
    CHECK(a.m_cumulative == doctest::Approx(b.m_cumulative));
  }
}
