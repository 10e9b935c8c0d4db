#pragma once

#include "wlflip/bounds.hpp"
#include "wlflip/faults.hpp"
#include "wlflip/graph.hpp"
#include "wlflip/metrics.hpp"
#include "wlflip/nn.hpp"
#include "wlflip/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wlflip {

/// Flat key = value configuration; keys match the field names below.
struct ExperimentConfig {
  std::filesystem::path dataset_path;
  std::string dataset_name;
  Architecture architecture = Architecture::GIN;
  Activation activation = Activation::ReLU;
  int depth = 3;
  int hidden = 64;
  int mlp_depth = 2;
  float gin_epsilon = 0.0f;
  std::vector<LayerTarget> target_layers{LayerTarget{1, std::nullopt}};
  std::vector<BitField> bit_fields{BitField::Sign, BitField::Exponent, BitField::Mantissa};
  std::vector<double> fractions{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  int model_seeds = 5;
  int repeats = 5;
  std::uint64_t base_seed = 0;
  double epsilon = kEpsMach;
  std::filesystem::path output_dir = "results";
  FlipPopulation flip_population = FlipPopulation::Eligible;
  bool degree_labels = false;
  int threads = 1;
  bool save_flip_logs = false;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Relative `dataset_path` and `output_dir` resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {},
                              const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& file);
void write_config(const ExperimentConfig& config, std::ostream& out);

ModelConfig model_config(const ExperimentConfig& config, int input_dim, int seed_index);
std::uint64_t model_seed(std::uint64_t base_seed, int seed_index);
std::uint64_t run_seed(std::uint64_t base_seed, int seed_index, double fraction, int repeat,
                       const LayerTarget& layer, BitField field);

struct RunResult {
  // configuration echo
  std::string dataset;
  LabelSource label_source = LabelSource::NodeLabels;
  Architecture architecture = Architecture::GIN;
  Activation activation = Activation::ReLU;
  int depth = 0;
  int hidden = 0;
  int mlp_depth = 0;
  double gin_epsilon = 0;
  double epsilon = kEpsMach;
  FlipPopulation population = FlipPopulation::Eligible;
  std::uint64_t base_seed = 0;
  // run identity
  int seed_index = 0;
  int repeat = 0;
  double fraction = 0;
  LayerTarget layer;
  BitField field = BitField::Sign;
  std::uint64_t model_seed = 0;
  std::uint64_t run_seed = 0;
  // dataset properties
  double s_wl = 0;  // S_WL^Pi over k rounds
  double homophily = 0;
  int feature_dim = 0;
  // flip accounting
  std::size_t eligible = 0;
  std::size_t applied = 0;
  // metrics
  double clean_exp = 0, clean_m = 0, clean_s_gnn = 0;
  double attacked_exp = 0, attacked_m = 0, attacked_s_gnn = 0;
  MetricDeltas delta;
  std::size_t certified_pairs = 0;
  bool ok = true;
  std::string error;
  double wall_ms = 0;  // kept in memory only; the CSV stays byte-stable
};

/// Every (seed, fraction, repeat, layer, field) combination, sorted in that
/// order. Failing runs become error rows.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);
std::vector<RunResult> run_experiment(const ExperimentConfig& config, const GraphDataset& dataset);

inline constexpr int kCsvFormatVersion = 1;
std::string csv_header();
void emit_csv(const std::vector<RunResult>& results, std::ostream& out);
void emit_csv(const std::vector<RunResult>& results, const std::filesystem::path& path);
std::vector<RunResult> read_csv(std::istream& in, const std::string& source = "<csv>");
std::vector<RunResult> read_csv(const std::filesystem::path& path);

struct CorrelationRow {
  std::string stratum;   // "field=sign activation=ReLU layer=1" or "pooled"
  std::string property;  // dM, dS_GNN, H_D, feature_dim, S_WL
  CorrelationResult spearman;
  CorrelationResult pearson;
};

struct CorrelationTable {
  std::vector<CorrelationRow> rows;
  std::vector<std::string> notices;  // skipped strata
};

/// Spearman and Pearson of each property against dExp per stratum
/// (field, activation, layer) and pooled. Error rows are ignored.
CorrelationTable correlate_results(const std::vector<RunResult>& results);
void print_correlations(const CorrelationTable& table, std::ostream& out);

/// Model-independent first-layer bounds of a dataset, for report footnotes.
struct DatasetBounds {
  DatasetStats stats;
  int g = 0;
  std::int64_t m = 0;
  std::int64_t first_layer = 0;
  HomophilyBound homophily;
};

DatasetBounds dataset_bounds(const GraphDataset& dataset, std::int64_t hidden);

/// Plain-text tables of mean and sd of Exp and dExp per fraction.
void emit_report(const std::vector<RunResult>& results, const std::optional<DatasetBounds>& bounds,
                 std::ostream& out);
/// Static bar chart of mean attacked Exp per fraction with sd whiskers.
void emit_svg(const std::vector<RunResult>& results, std::ostream& out);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace wlflip
