#include "wlflip/metrics.hpp"

#include "wlflip/errors.hpp"

namespace wlflip {

ExpressivityResult expressivity(const std::vector<ForwardTrace>& traces, const WLColoring& coloring, int k,
                                double eps) {
  if (coloring.iterations() < k) throw ConfigError("WL colouring has fewer rounds than the model depth");
  ExpressivityResult r;
  for (std::size_t g = 0; g < traces.size(); ++g)
    for (std::size_t h = g + 1; h < traces.size(); ++h) {
      if (wl_difference(coloring, g, h, k) == 0) continue;
      ++r.certified_pairs;
      if (distinguishable(traces[g].graph_embedding, traces[h].graph_embedding, eps)) ++r.distinguished_pairs;
    }
  if (r.certified_pairs == 0) {
    r.empty_denominator = true;
    r.value = 1.0;
  } else {
    r.value = static_cast<double>(r.distinguished_pairs) / static_cast<double>(r.certified_pairs);
  }
  return r;
}

ExpressivityResult expressivity(const GnnModel& model, const GraphDataset& dataset, int k, double eps) {
  return expressivity(forward_all(model, dataset), wl_refine(dataset.graphs, k), k, eps);
}

Subdivision gnn_subdivision(const std::vector<ForwardTrace>& traces, double eps) {
  Subdivision s;
  if (traces.empty()) return s;
  const std::size_t k = traces.front().hidden.size() - 1;
  s.per_layer.assign(k, 0.0);
  for (const auto& t : traces) {
    int prev = delta_count(t.hidden[0], eps);
    for (std::size_t j = 1; j <= k; ++j) {
      const int cur = delta_count(t.hidden[j], eps);
      // an empty graph has no rows at any layer; count it as ratio 1
      s.per_layer[j - 1] += prev == 0 ? 1.0 : static_cast<double>(cur) / prev;
      prev = cur;
    }
  }
  for (auto& v : s.per_layer) {
    v /= static_cast<double>(traces.size());
    s.cumulative *= v;
  }
  return s;
}

Subdivision gnn_subdivision(const GnnModel& model, const GraphDataset& dataset, double eps) {
  return gnn_subdivision(forward_all(model, dataset), eps);
}

double unique_mapping_ratio(const std::vector<ForwardTrace>& traces, int j, double eps) {
  const LayerRef first{j, 1};
  const int last = static_cast<int>(traces.empty() ? 1 : traces.front().stage_outputs[static_cast<std::size_t>(j - 1)].size());
  const auto z = layer_rows(traces, first, true);
  const auto h = layer_rows(traces, LayerRef{j, last}, false);
  const int nz = delta_count(z.rows, eps);
  if (nz == 0) return 1.0;
  return static_cast<double>(delta_count(h.rows, eps)) / nz;
}

double unique_mapping_ratio(const GnnModel& model, const GraphDataset& dataset, int j, double eps) {
  if (j < 1 || j > model.depth()) throw AddressError("layer index out of range");
  return unique_mapping_ratio(forward_all(model, dataset), j, eps);
}

MetricReport compute_metrics(const GnnModel& model, const GraphDataset& dataset, const WLColoring& coloring,
                             double eps) {
  const auto traces = forward_all(model, dataset);
  MetricReport r;
  r.k = model.depth();
  r.graph_count = dataset.size();
  r.epsilon = eps;
  r.exp = expressivity(traces, coloring, r.k, eps);
  r.s_gnn = gnn_subdivision(traces, eps);
  for (int j = 1; j <= r.k; ++j) {
    r.m.push_back(unique_mapping_ratio(traces, j, eps));
    r.m_cumulative *= r.m.back();
  }
  return r;
}

MetricReport compute_metrics(const GnnModel& model, const GraphDataset& dataset, double eps) {
  return compute_metrics(model, dataset, wl_refine(dataset.graphs, model.depth()), eps);
}

MetricDeltas metric_deltas(const MetricReport& clean, const MetricReport& attacked) {
  if (clean.k != attacked.k || clean.graph_count != attacked.graph_count || clean.epsilon != attacked.epsilon)
    throw ConfigError("metric reports come from different configurations");
  return {clean.exp.value - attacked.exp.value, clean.m_cumulative - attacked.m_cumulative,
          clean.s_gnn.cumulative - attacked.s_gnn.cumulative};
}

}  // namespace wlflip
