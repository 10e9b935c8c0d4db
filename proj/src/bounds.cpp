#include "wlflip/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wlflip {

namespace {

// Distinct rows with the first occurrence as representative.
std::vector<Eigen::Index> unique_rows(const Matrix32& rows) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rows.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return bit_less(rows.row(a), rows.row(b)); });
  std::vector<Eigen::Index> out;
  for (std::size_t k = 0; k < order.size(); ++k)
    if (k == 0 || !bit_equal(rows.row(order[k - 1]), rows.row(order[k]))) out.push_back(order[k]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

L0Witness max_l0_diff(const std::vector<ForwardTrace>& traces, LayerRef layer, double eps) {
  const auto rows = layer_rows(traces, layer, true);
  L0Witness best;
  const auto reps = unique_rows(rows.rows);
  if (rows.rows.rows() >= 2) best.witness = {rows.provenance[0], rows.provenance[1]};
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t b = a + 1; b < reps.size(); ++b) {
      const int d = l0_distance(rows.rows.row(reps[a]), rows.rows.row(reps[b]), eps);
      if (d > best.d) {
        best.d = d;
        best.witness = {rows.provenance[static_cast<std::size_t>(reps[a])],
                        rows.provenance[static_cast<std::size_t>(reps[b])]};
      }
    }
  return best;
}

L0Witness max_l0_diff(const GnnModel& model, const GraphDataset& dataset, LayerRef layer, double eps) {
  model.dense(layer);
  return max_l0_diff(forward_all(model, dataset), layer, eps);
}

L0Witness max_l0_diff_between(const ForwardTrace& g, const ForwardTrace& h, std::size_t gi,
                              std::size_t hi, LayerRef layer, double eps) {
  const auto& xg = g.stage_input(layer);
  const auto& xh = h.stage_input(layer);
  L0Witness best;
  for (Eigen::Index u = 0; u < xg.rows(); ++u)
    for (Eigen::Index v = 0; v < xh.rows(); ++v) {
      const int d = l0_distance(xg.row(u), xh.row(v), eps);
      if (!best.witness || d > best.d) {
        best.d = d;
        best.witness = {NodeRef{static_cast<int>(gi), static_cast<int>(u)},
                        NodeRef{static_cast<int>(hi), static_cast<int>(v)}};
      }
    }
  return best;
}

std::optional<WLPair> wl_max_pair(const WLColoring& coloring, std::span<const LabeledGraph> graphs, int j) {
  std::optional<WLPair> best;
  for (std::size_t g = 0; g < graphs.size(); ++g)
    for (std::size_t h = g + 1; h < graphs.size(); ++h) {
      if (graphs[g].node_count() != graphs[h].node_count()) continue;
      const int e = wl_difference(coloring, g, h, j);
      if (!best || e > best->e) best = WLPair{g, h, e};
    }
  return best;
}

std::optional<WLPair> wl_max_pair(const GraphDataset& dataset, int j) {
  return wl_max_pair(wl_refine(dataset.graphs, j), dataset.graphs, j);
}

std::int64_t node_bound(const BoundInputs& in) {
  return in.relu ? in.d * in.m : in.d * in.m * in.b;
}

std::int64_t graph_bound(const BoundInputs& in) { return in.e * node_bound(in); }

std::int64_t first_layer_nz(int max_degree, int g) {
  return std::min<std::int64_t>(2 * static_cast<std::int64_t>(max_degree), g);
}

std::int64_t first_layer_bound(int max_degree, int g, std::int64_t m, int b) {
  return m * b * first_layer_nz(max_degree, g);
}

HomophilyBound homophily_bound(const DatasetStats& stats, int g, std::int64_t m, int b) {
  HomophilyBound out;
  out.nz_raw = std::min(2.0 * stats.max_degree * (1.0 - stats.homophily) * (1.0 - stats.connect_prob),
                        static_cast<double>(g));
  // P_D is a sum over graphs and can exceed 1, driving the raw value negative
  out.nz_ceil = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(out.nz_raw)));
  out.flips_raw = static_cast<double>(m) * b * out.nz_raw;
  out.flips = m * b * out.nz_ceil;
  return out;
}

FlipProbability random_flip_probability(const BoundInputs& in, BoundLevel level) {
  FlipProbability p;
  p.beta = static_cast<double>(in.d) * static_cast<double>(in.m) * std::ldexp(1.0, in.b);
  if (level == BoundLevel::Graph) p.beta *= static_cast<double>(in.e);
  const double nm = static_cast<double>(in.n) * static_cast<double>(in.m);
  if (nm <= 1.0) {
    p.degenerate = true;
    p.log_bound = 0.0;
    p.bound = 1.0;
    return p;
  }
  p.log_bound = p.beta == 0.0 ? 0.0 : -p.beta * std::log(nm);
  const double linear = std::exp(p.log_bound);
  if (linear >= std::numeric_limits<double>::min()) p.bound = linear;
  return p;
}

}  // namespace wlflip
