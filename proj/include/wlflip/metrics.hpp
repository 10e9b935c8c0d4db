#pragma once

#include "wlflip/dense.hpp"
#include "wlflip/graph.hpp"
#include "wlflip/nn.hpp"
#include "wlflip/wl.hpp"

#include <cstddef>
#include <vector>

namespace wlflip {

/// Greedy first-fit classing of vectors under max-norm tolerance.
struct DistinctnessIndex {
  double tolerance = kEpsMach;
  std::vector<Eigen::Index> representatives;  // row ids of the class representatives
  std::vector<int> assignment;                // row id -> class id

  int count() const { return static_cast<int>(representatives.size()); }
};

/// A row joins the first class whose representative is close in every
/// coordinate, else opens a new class. Rows are visited in input order.
template <typename Derived>
DistinctnessIndex delta_distinct(const Eigen::MatrixBase<Derived>& rows, double eps = kEpsMach) {
  DistinctnessIndex idx;
  idx.tolerance = eps;
  idx.assignment.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    int cls = -1;
    for (std::size_t c = 0; c < idx.representatives.size(); ++c)
      if (!distinguishable(rows.row(r), rows.row(idx.representatives[c]), eps)) {
        cls = static_cast<int>(c);
        break;
      }
    if (cls < 0) {
      cls = static_cast<int>(idx.representatives.size());
      idx.representatives.push_back(r);
    }
    idx.assignment.push_back(cls);
  }
  return idx;
}

template <typename Derived>
int delta_count(const Eigen::MatrixBase<Derived>& rows, double eps = kEpsMach) {
  return delta_distinct(rows, eps).count();
}

struct ExpressivityResult {
  double value = 1.0;
  std::size_t certified_pairs = 0;      // Delta_WL(G, H, k) > 0
  std::size_t distinguished_pairs = 0;  // graph embeddings distinguishable
  bool empty_denominator = false;
};

/// Fraction of WL-certified non-isomorphic pairs whose graph embeddings are
/// distinguishable. `coloring` must hold at least k rounds.
ExpressivityResult expressivity(const std::vector<ForwardTrace>& traces, const WLColoring& coloring, int k,
                                double eps = kEpsMach);
ExpressivityResult expressivity(const GnnModel& model, const GraphDataset& dataset, int k,
                                double eps = kEpsMach);

struct Subdivision {
  std::vector<double> per_layer;  // S^(j) for j = 1..k
  double cumulative = 1.0;
};

/// Mean over graphs of |H^(j)|_delta / |H^(j-1)|_delta, with H^(0) = X.
Subdivision gnn_subdivision(const std::vector<ForwardTrace>& traces, double eps = kEpsMach);
Subdivision gnn_subdivision(const GnnModel& model, const GraphDataset& dataset, double eps = kEpsMach);

/// |H^(j)|_delta / |Z^(j)|_delta over all nodes of the dataset.
double unique_mapping_ratio(const std::vector<ForwardTrace>& traces, int j, double eps = kEpsMach);
double unique_mapping_ratio(const GnnModel& model, const GraphDataset& dataset, int j,
                            double eps = kEpsMach);

struct MetricReport {
  int k = 0;
  std::size_t graph_count = 0;
  double epsilon = kEpsMach;
  ExpressivityResult exp;
  Subdivision s_gnn;
  std::vector<double> m;  // M^(j), j = 1..k
  double m_cumulative = 1.0;
};

/// One forward pass per graph, then every metric.
MetricReport compute_metrics(const GnnModel& model, const GraphDataset& dataset, const WLColoring& coloring,
                             double eps = kEpsMach);
MetricReport compute_metrics(const GnnModel& model, const GraphDataset& dataset, double eps = kEpsMach);

struct MetricDeltas {
  double exp = 0;
  double m_cumulative = 0;
  double s_gnn_cumulative = 0;
};

/// clean - attacked; positive means degradation. Throws ConfigError when the
/// reports come from different settings.
MetricDeltas metric_deltas(const MetricReport& clean, const MetricReport& attacked);

}  // namespace wlflip
