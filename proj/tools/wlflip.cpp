// Command-line front end: dataset statistics, WL refinement, flip bounds,
// fault-injection sweeps and their analysis.

#include "wlflip/bounds.hpp"
#include "wlflip/errors.hpp"
#include "wlflip/harness.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <set>
#include <iostream>

namespace {

using namespace wlflip;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

std::string fmt(double x, int digits = 4) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

GraphDataset load(const std::string& dir, const std::string& name, bool degree_labels) {
  return parse_tudataset(dir, name, ParseOptions{degree_labels});
}

int cmd_stats(const std::string& dir, const std::string& name, bool degree_labels) {
  const auto start = std::chrono::steady_clock::now();
  const auto ds = load(dir, name, degree_labels);
  const auto s = dataset_stats(ds);
  std::cout << "dataset:        " << ds.name << '\n'
            << "graphs:         " << s.graph_count << '\n'
            << "avg nodes:      " << fmt(s.avg_nodes, 2) << '\n'
            << "avg edges:      " << fmt(s.avg_edges, 2) << '\n'
            << "homophily H_D:  " << fmt(s.homophily) << '\n'
            << "connect P_D:    " << fmt(s.connect_prob) << '\n'
            << "max degree:     " << s.max_degree << '\n'
            << "node labels g:  " << s.label_count << " (" << to_string(ds.label_source) << ")\n";
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "elapsed " << fmt(secs, 3) << " s\n";
  return kOk;
}

int cmd_wl(const std::string& dir, const std::string& name, int iters, bool degree_labels) {
  if (iters < 0) throw CLI::ValidationError("--iters", "must be non-negative");
  const auto ds = load(dir, name, degree_labels);
  const auto coloring = wl_refine(ds.graphs, iters);
  const auto st = wl_subdivision(coloring);
  std::cout << "dataset " << ds.name << ", " << ds.size() << " graphs, " << iters << " WL iterations\n";
  std::cout << "iter | colours (dataset) | mean colours/graph | S_WL ratio | max-diff pair\n";
  for (int t = 0; t <= iters; ++t) {
    std::set<int> all;
    double mean = 0;
    for (std::size_t g = 0; g < ds.size(); ++g) {
      const auto& c = coloring.colors(t, g);
      all.insert(c.begin(), c.end());
      mean += coloring.distinct(t, g);
    }
    mean /= std::max<double>(1, static_cast<double>(ds.size()));
    std::cout << t << " | " << all.size() << " | " << fmt(mean, 3) << " | "
              << (t == 0 ? std::string("-") : fmt(st.subdivision_ratios[static_cast<std::size_t>(t - 1)]))
              << " | ";
    if (const auto p = wl_max_pair(coloring, ds.graphs, t))
      std::cout << "(" << p->g << "," << p->h << ") e=" << p->e << '\n';
    else
      std::cout << "none\n";
  }
  std::cout << "cumulative S_WL: " << fmt(st.cumulative) << '\n';
  return kOk;
}

struct BoundsArgs {
  std::string dir, name, arch = "GIN", activation = "ReLU", layer = "1.1";
  int hidden = 64, depth = 3, mlp_depth = 2;
  std::uint64_t seed = 0;
  bool degree_labels = false;
};

int cmd_bounds(const BoundsArgs& a) {
  LayerTarget target;
  ModelConfig mc;
  try {
    target = LayerTarget::parse(a.layer);
    mc.architecture = parse_architecture(a.arch);
    mc.activation = parse_activation(a.activation);
  } catch (const ConfigError& e) {
    throw CLI::ValidationError("bounds", e.what());
  }
  const LayerRef ref{target.j, target.i.value_or(1)};
  mc.hidden = a.hidden;
  mc.depth = a.depth;
  mc.mlp_depth = a.mlp_depth;
  mc.seed = a.seed;
  const auto ds = one_hot_encode(load(a.dir, a.name, a.degree_labels));
  mc.input_dim = ds.label_alphabet_size;
  const auto model = init_model(mc);
  const auto& layer = model.dense(ref);

  const auto traces = forward_all(model, ds);
  const auto l0 = max_l0_diff(traces, ref);
  const auto pair = wl_max_pair(ds, ref.j);

  BoundInputs in;
  in.d = l0.d;
  in.e = pair ? pair->e : 0;
  in.m = layer.outputs();
  in.n = layer.inputs();
  in.relu = layer.activation == Activation::ReLU;

  std::cout << "model " << to_string(mc.architecture) << "/" << to_string(mc.activation) << " hidden " << mc.hidden
            << ", layer (" << ref.j << "," << ref.i << "): n=" << in.n << " m=" << in.m << '\n';
  std::cout << "d_{j,i} = " << in.d;
  if (l0.witness)
    std::cout << "  witness (" << l0.witness->first.graph << ":" << l0.witness->first.node << ", "
              << l0.witness->second.graph << ":" << l0.witness->second.node << ")";
  std::cout << '\n';
  if (pair)
    std::cout << "e_j = " << pair->e << "  pair (" << pair->g << "," << pair->h << ")\n";
  else
    std::cout << "e_j undefined: no equal-order graph pair\n";
  BoundInputs full = in;
  full.relu = false;
  std::cout << "node bound:  " << node_bound(full) << " flips";
  if (in.relu) std::cout << " (ReLU sign-only: " << node_bound(in) << ")";
  std::cout << '\n';
  if (pair) {
    std::cout << "graph bound: " << graph_bound(full) << " flips";
    if (in.relu) std::cout << " (ReLU sign-only: " << graph_bound(in) << ")";
    std::cout << '\n';
  }
  const auto db = dataset_bounds(ds, model.dense({1, 1}).outputs());
  std::cout << "first-layer bound: " << db.first_layer << " flips (nz = " << first_layer_nz(db.stats.max_degree, db.g)
            << ")\n";
  std::cout << "homophily bound:   " << db.homophily.flips << " flips (nz_H = " << fmt(db.homophily.nz_raw) << ")\n";
  for (const auto level : {BoundLevel::Node, BoundLevel::Graph}) {
    if (level == BoundLevel::Graph && !pair) continue;
    const auto p = random_flip_probability(full, level);
    std::cout << (level == BoundLevel::Node ? "random-flip P (node):  " : "random-flip P (graph): ")
              << "ln P <= " << format_double(p.log_bound);
    if (p.bound) std::cout << ", P <= " << format_double(*p.bound);
    else std::cout << " (linear value underflows)";
    if (p.degenerate) std::cout << " [degenerate: n*m <= 1]";
    std::cout << '\n';
  }
  return kOk;
}

int cmd_attack(const std::string& file, int threads) {
  auto config = load_config(file);
  if (threads > 0) config.threads = threads;
  const auto results = run_experiment(config);
  std::filesystem::create_directories(config.output_dir);
  emit_csv(results, config.output_dir / "results.csv");
  {
    std::ofstream cfg(config.output_dir / "config.txt");
    write_config(config, cfg);
  }
  std::optional<DatasetBounds> bounds;
  try {
    bounds = dataset_bounds(load(config.dataset_path.string(), config.dataset_name, config.degree_labels),
                            config.hidden);
  } catch (const DataError&) {
  }
  std::ofstream report(config.output_dir / "report.txt");
  emit_report(results, bounds, report);
  std::ofstream svg(config.output_dir / "report.svg");
  emit_svg(results, svg);
  std::size_t errors = 0;
  double wall = 0;
  for (const auto& r : results) {
    errors += r.ok ? 0 : 1;
    wall += r.wall_ms;
  }
  std::cout << results.size() << " runs (" << errors << " errors) in " << fmt(wall / 1000.0, 2) << " s of run time\n"
            << "wrote " << (config.output_dir / "results.csv").string() << ", report.txt, report.svg\n";
  return kOk;
}

int cmd_correlate(const std::string& csv) {
  print_correlations(correlate_results(read_csv(std::filesystem::path(csv))), std::cout);
  return kOk;
}

int cmd_report(const std::string& csv, const std::string& svg, const std::string& dir, const std::string& name,
               bool degree_labels) {
  const auto results = read_csv(std::filesystem::path(csv));
  std::optional<DatasetBounds> bounds;
  if (!dir.empty()) {
    const std::int64_t hidden = results.empty() ? 64 : results.front().hidden;
    bounds = dataset_bounds(load(dir, name, degree_labels), hidden);
  }
  emit_report(results, bounds, std::cout);
  if (!svg.empty()) {
    std::ofstream out(svg);
    if (!out) throw LoadError("cannot write " + svg);
    emit_svg(results, out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wlflip: WL-bounded expressivity of GNNs under weight bit flips"};
  app.require_subcommand(1);

  std::string dir, name;
  bool degree_labels = false;

  auto* stats = app.add_subcommand("stats", "dataset statistics");
  stats->add_option("dir", dir, "dataset directory")->required();
  stats->add_option("name", name, "dataset name (file prefix)")->required();
  stats->add_flag("--degree-labels", degree_labels, "use node degrees as labels");

  int iters = 3;
  auto* wl = app.add_subcommand("wl", "joint WL refinement summary");
  wl->add_option("dir", dir)->required();
  wl->add_option("name", name)->required();
  wl->add_option("--iters", iters, "refinement rounds")->check(CLI::Range(0, 1 << 20))->capture_default_str();
  wl->add_flag("--degree-labels", degree_labels);

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "flip-count bounds for one layer of a fresh model");
  bounds->add_option("dir", ba.dir)->required();
  bounds->add_option("name", ba.name)->required();
  bounds->add_option("--arch", ba.arch, "DS, GIN or GCN")->capture_default_str();
  bounds->add_option("--activation", ba.activation, "ReLU, Sigmoid or SiLU")->capture_default_str();
  bounds->add_option("--hidden", ba.hidden)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  bounds->add_option("--depth", ba.depth)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  bounds->add_option("--mlp-depth", ba.mlp_depth)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  bounds->add_option("--layer", ba.layer, "j.i (1-based)")->capture_default_str();
  bounds->add_option("--seed", ba.seed)->capture_default_str();
  bounds->add_flag("--degree-labels", ba.degree_labels);

  std::string config_file;
  int threads = 0;
  auto* attack = app.add_subcommand("attack", "run a fault-injection sweep from a config file");
  attack->add_option("config", config_file)->required();
  attack->add_option("--threads", threads, "override the config's worker count");

  std::string csv;
  auto* correlate = app.add_subcommand("correlate", "correlations of dataset and metric deltas with dExp");
  correlate->add_option("results", csv)->required();

  std::string svg, report_dir, report_name;
  auto* report = app.add_subcommand("report", "tables of Exp per flip fraction");
  report->add_option("results", csv)->required();
  report->add_option("--svg", svg, "also write a bar chart");
  report->add_option("--dataset-dir", report_dir, "dataset for bound footnotes");
  report->add_option("--dataset-name", report_name);
  report->add_flag("--degree-labels", degree_labels);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*stats) return cmd_stats(dir, name, degree_labels);
    if (*wl) return cmd_wl(dir, name, iters, degree_labels);
    if (*bounds) return cmd_bounds(ba);
    if (*attack) return cmd_attack(config_file, threads);
    if (*correlate) return cmd_correlate(csv);
    if (*report) {
      if (report_dir.empty() != report_name.empty()) {
        std::cerr << "--dataset-dir and --dataset-name go together\n";
        return kUsage;
      }
      return cmd_report(csv, svg, report_dir, report_name, degree_labels);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const AddressError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
