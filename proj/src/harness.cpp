#include "wlflip/harness.hpp"

#include "wlflip/errors.hpp"
#include "wlflip/seed.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace wlflip {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string fixed(double x, int digits = 4) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_number(const std::string& raw, const std::string& what) {
  const auto s = trim(raw);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("invalid value '" + raw + "' for " + what);
  return v;
}

bool parse_bool(const std::string& raw, const std::string& what) {
  const auto s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("invalid boolean '" + raw + "' for " + what);
}

double parse_fraction(const std::string& raw) {
  auto s = trim(raw);
  if (!s.empty() && s.back() == '%') return parse_number<double>(s.substr(0, s.size() - 1), "fractions") / 100.0;
  return parse_number<double>(s, "fractions");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& value, F&& item) {
  std::vector<T> out;
  for (const auto& part : split(value, ',')) {
    const auto t = trim(part);
    if (!t.empty()) out.push_back(item(t));
  }
  return out;
}

std::string join_fractions(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + format_double(xs[k]);
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset_name.empty()) throw ConfigError("dataset_name is required");
  if (depth < 1 || hidden < 1 || mlp_depth < 1) throw ConfigError("depth, hidden and mlp_depth must be positive");
  if (model_seeds < 1 || repeats < 1) throw ConfigError("model_seeds and repeats must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (!(epsilon >= 0)) throw ConfigError("epsilon must be non-negative");
  if (fractions.empty() || target_layers.empty() || bit_fields.empty())
    throw ConfigError("fractions, target_layers and bit_fields must be non-empty");
  for (const double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("fraction " + format_double(f) + " is outside (0, 1]");
  const int stages = architecture == Architecture::GCN ? 1 : mlp_depth;
  for (const auto& t : target_layers)
    if (t.j < 1 || t.j > depth || (t.i && (*t.i < 1 || *t.i > stages)))
      throw ConfigError("target layer " + t.to_string() + " does not exist in the model");
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& source) {
  ExperimentConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(source, lineno, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      if (key == "dataset_path") c.dataset_path = value;
      else if (key == "dataset_name") c.dataset_name = value;
      else if (key == "architecture") c.architecture = parse_architecture(value);
      else if (key == "activation") c.activation = parse_activation(value);
      else if (key == "depth") c.depth = parse_number<int>(value, key);
      else if (key == "hidden") c.hidden = parse_number<int>(value, key);
      else if (key == "mlp_depth") c.mlp_depth = parse_number<int>(value, key);
      else if (key == "gin_epsilon") c.gin_epsilon = parse_number<float>(value, key);
      else if (key == "target_layers") c.target_layers = parse_list<LayerTarget>(value, LayerTarget::parse);
      else if (key == "bit_fields") c.bit_fields = parse_list<BitField>(value, parse_bit_field);
      else if (key == "fractions") c.fractions = parse_list<double>(value, parse_fraction);
      else if (key == "model_seeds") c.model_seeds = parse_number<int>(value, key);
      else if (key == "repeats") c.repeats = parse_number<int>(value, key);
      else if (key == "base_seed") c.base_seed = parse_number<std::uint64_t>(value, key);
      else if (key == "epsilon") c.epsilon = parse_number<double>(value, key);
      else if (key == "output_dir") c.output_dir = value;
      else if (key == "flip_population") c.flip_population = parse_flip_population(value);
      else if (key == "degree_labels") c.degree_labels = parse_bool(value, key);
      else if (key == "threads") c.threads = parse_number<int>(value, key);
      else if (key == "save_flip_logs") c.save_flip_logs = parse_bool(value, key);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(source, lineno, e.what());
    }
  }
  if (!base_dir.empty()) {
    if (c.dataset_path.is_relative()) c.dataset_path = base_dir / c.dataset_path;
    if (c.output_dir.is_relative()) c.output_dir = base_dir / c.output_dir;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open config " + file.string());
  return parse_config(in, file.parent_path(), file.string());
}

void write_config(const ExperimentConfig& c, std::ostream& out) {
  out << "dataset_path = " << c.dataset_path.string() << '\n'
      << "dataset_name = " << c.dataset_name << '\n'
      << "architecture = " << to_string(c.architecture) << '\n'
      << "activation = " << to_string(c.activation) << '\n'
      << "depth = " << c.depth << '\n'
      << "hidden = " << c.hidden << '\n'
      << "mlp_depth = " << c.mlp_depth << '\n'
      << "gin_epsilon = " << format_double(c.gin_epsilon) << '\n';
  out << "target_layers = ";
  for (std::size_t k = 0; k < c.target_layers.size(); ++k) out << (k ? "," : "") << c.target_layers[k].to_string();
  out << "\nbit_fields = ";
  for (std::size_t k = 0; k < c.bit_fields.size(); ++k) out << (k ? "," : "") << to_string(c.bit_fields[k]);
  out << "\nfractions = " << join_fractions(c.fractions) << '\n'
      << "model_seeds = " << c.model_seeds << '\n'
      << "repeats = " << c.repeats << '\n'
      << "base_seed = " << c.base_seed << '\n'
      << "epsilon = " << format_double(c.epsilon) << '\n'
      << "output_dir = " << c.output_dir.string() << '\n'
      << "flip_population = " << to_string(c.flip_population) << '\n'
      << "degree_labels = " << (c.degree_labels ? "true" : "false") << '\n'
      << "threads = " << c.threads << '\n'
      << "save_flip_logs = " << (c.save_flip_logs ? "true" : "false") << '\n';
}

std::uint64_t model_seed(std::uint64_t base_seed, int seed_index) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(seed_index)});
}

std::uint64_t run_seed(std::uint64_t base_seed, int seed_index, double fraction, int repeat,
                       const LayerTarget& layer, BitField field) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(seed_index), std::bit_cast<std::uint64_t>(fraction),
                      static_cast<std::uint64_t>(repeat), static_cast<std::uint64_t>(layer.j),
                      static_cast<std::uint64_t>(layer.i.value_or(0)), static_cast<std::uint64_t>(field)});
}

ModelConfig model_config(const ExperimentConfig& config, int input_dim, int seed_index) {
  ModelConfig m;
  m.architecture = config.architecture;
  m.activation = config.activation;
  m.input_dim = input_dim;
  m.hidden = config.hidden;
  m.depth = config.depth;
  m.mlp_depth = config.mlp_depth;
  m.gin_epsilon = config.gin_epsilon;
  m.seed = model_seed(config.base_seed, seed_index);
  return m;
}

namespace {

struct Job {
  int seed_index;
  double fraction;
  int repeat;
  LayerTarget layer;
  BitField field;
};

struct CleanState {
  std::optional<GnnModel> model;
  MetricReport metrics;
  std::string error;
};

auto sort_key(const RunResult& r) {
  return std::make_tuple(r.seed_index, r.fraction, r.repeat, r.layer, static_cast<int>(r.field));
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto dataset = parse_tudataset(config.dataset_path, config.dataset_name, ParseOptions{config.degree_labels});
  return run_experiment(config, one_hot_encode(std::move(dataset)));
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config, const GraphDataset& input) {
  config.validate();
  const GraphDataset dataset =
      (!input.graphs.empty() && !input.graphs.front().has_features()) ? one_hot_encode(input) : input;
  const int k = config.depth;
  const auto coloring = wl_refine(dataset.graphs, k);
  const double s_wl = wl_subdivision(coloring).cumulative;
  const auto dstats = dataset_stats(dataset);
  const int feature_dim = dataset.label_alphabet_size;

  std::vector<CleanState> clean(static_cast<std::size_t>(config.model_seeds));
  for (int s = 0; s < config.model_seeds; ++s) {
    auto& st = clean[static_cast<std::size_t>(s)];
    try {
      st.model = init_model(model_config(config, feature_dim, s));
      st.metrics = compute_metrics(*st.model, dataset, coloring, config.epsilon);
    } catch (const std::exception& e) {
      st.model.reset();
      st.error = e.what();
    }
  }

  std::vector<Job> jobs;
  for (int s = 0; s < config.model_seeds; ++s)
    for (const double f : config.fractions)
      for (int r = 0; r < config.repeats; ++r)
        for (const auto& layer : config.target_layers)
          for (const auto field : config.bit_fields) jobs.push_back({s, f, r, layer, field});

  if (config.save_flip_logs) std::filesystem::create_directories(config.output_dir / "flips");

  std::vector<RunResult> results(jobs.size());
  auto run_one = [&](std::size_t idx) {
    const auto& job = jobs[idx];
    const auto start = std::chrono::steady_clock::now();
    RunResult& r = results[idx];
    r.dataset = dataset.name;
    r.label_source = dataset.label_source;
    r.architecture = config.architecture;
    r.activation = config.activation;
    r.depth = config.depth;
    r.hidden = config.hidden;
    r.mlp_depth = config.architecture == Architecture::GCN ? 1 : config.mlp_depth;
    r.gin_epsilon = config.gin_epsilon;
    r.epsilon = config.epsilon;
    r.population = config.flip_population;
    r.base_seed = config.base_seed;
    r.seed_index = job.seed_index;
    r.repeat = job.repeat;
    r.fraction = job.fraction;
    r.layer = job.layer;
    r.field = job.field;
    r.model_seed = model_seed(config.base_seed, job.seed_index);
    r.run_seed = run_seed(config.base_seed, job.seed_index, job.fraction, job.repeat, job.layer, job.field);
    r.s_wl = s_wl;
    r.homophily = dstats.homophily;
    r.feature_dim = feature_dim;
    const auto& st = clean[static_cast<std::size_t>(job.seed_index)];
    try {
      if (!st.model) throw Error("clean model failed: " + st.error);
      r.clean_exp = st.metrics.exp.value;
      r.clean_m = st.metrics.m_cumulative;
      r.clean_s_gnn = st.metrics.s_gnn.cumulative;
      r.certified_pairs = st.metrics.exp.certified_pairs;
      GnnModel model = *st.model;
      const FlipPlan plan{job.layer, job.field, job.fraction, r.run_seed, config.flip_population};
      const auto record = inject_random(model, plan);
      r.eligible = record.eligible_count;
      r.applied = record.applied_count;
      const auto attacked = compute_metrics(model, dataset, coloring, config.epsilon);
      r.attacked_exp = attacked.exp.value;
      r.attacked_m = attacked.m_cumulative;
      r.attacked_s_gnn = attacked.s_gnn.cumulative;
      r.delta = metric_deltas(st.metrics, attacked);
      if (config.save_flip_logs) {
        const auto name = "s" + std::to_string(job.seed_index) + "_f" + format_double(job.fraction) + "_r" +
                          std::to_string(job.repeat) + "_L" + job.layer.to_string() + "_" + to_string(job.field) +
                          ".txt";
        std::ofstream log(config.output_dir / "flips" / name);
        write_flip_record(record, log);
      }
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = sanitize(e.what());
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  const auto workers = static_cast<std::size_t>(std::max(1, config.threads));
  if (workers == 1) {
    for (std::size_t idx = 0; idx < jobs.size(); ++idx) run_one(idx);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t idx; (idx = next.fetch_add(1)) < jobs.size();) run_one(idx);
      });
    for (auto& t : pool) t.join();
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const RunResult& a, const RunResult& b) { return sort_key(a) < sort_key(b); });
  return results;
}

// ---- CSV ----

namespace {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "format_version", "dataset",      "label_source",    "architecture",    "activation",   "depth",        "hidden",
      "mlp_depth",      "gin_epsilon",  "epsilon",         "flip_population", "base_seed", "seed_index",
      "repeat",         "fraction",     "layer",           "field",        "model_seed",   "run_seed",
      "s_wl",           "homophily",    "feature_dim",     "eligible",     "applied",      "certified_pairs",
      "clean_exp",      "clean_m",      "clean_s_gnn",     "attacked_exp", "attacked_m",   "attacked_s_gnn",
      "delta_exp",      "delta_m",      "delta_s_gnn",     "status",       "error"};
  return cols;
}

}  // namespace

std::string csv_header() {
  std::string h;
  for (const auto& c : csv_columns()) h += (h.empty() ? "" : ",") + c;
  return h;
}

void emit_csv(const std::vector<RunResult>& results, std::ostream& out) {
  out << csv_header() << '\n';
  for (const auto& r : results) {
    out << kCsvFormatVersion << ',' << r.dataset << ',' << to_string(r.label_source) << ','
        << to_string(r.architecture) << ','
        << to_string(r.activation) << ',' << r.depth << ',' << r.hidden << ',' << r.mlp_depth << ','
        << format_double(r.gin_epsilon) << ',' << format_double(r.epsilon) << ',' << to_string(r.population)
        << ',' << r.base_seed << ',' << r.seed_index << ',' << r.repeat << ',' << format_double(r.fraction) << ','
        << r.layer.to_string() << ',' << to_string(r.field) << ',' << r.model_seed << ',' << r.run_seed << ','
        << format_double(r.s_wl) << ',' << format_double(r.homophily) << ',' << r.feature_dim << ','
        << r.eligible << ',' << r.applied << ',' << r.certified_pairs << ',' << format_double(r.clean_exp)
        << ',' << format_double(r.clean_m) << ',' << format_double(r.clean_s_gnn) << ','
        << format_double(r.attacked_exp) << ',' << format_double(r.attacked_m) << ','
        << format_double(r.attacked_s_gnn) << ',' << format_double(r.delta.exp) << ','
        << format_double(r.delta.m_cumulative) << ',' << format_double(r.delta.s_gnn_cumulative) << ','
        << (r.ok ? "ok" : "error") << ',' << r.error << '\n';
  }
}

void emit_csv(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  emit_csv(results, out);
  if (!out) throw LoadError("write failed for " + path.string());
}

std::vector<RunResult> read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw FormatError(source, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw FormatError(source, 1, "unexpected header");
  std::vector<RunResult> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != csv_columns().size())
      throw FormatError(source, lineno, "expected " + std::to_string(csv_columns().size()) + " fields, got " +
                                            std::to_string(f.size()));
    try {
      if (parse_number<int>(f[0], "format_version") != kCsvFormatVersion)
        throw ConfigError("unsupported format_version " + f[0]);
      RunResult r;
      std::size_t c = 1;
      r.dataset = f[c++];
      r.label_source = parse_label_source(f[c++]);
      r.architecture = parse_architecture(f[c++]);
      r.activation = parse_activation(f[c++]);
      r.depth = parse_number<int>(f[c++], "depth");
      r.hidden = parse_number<int>(f[c++], "hidden");
      r.mlp_depth = parse_number<int>(f[c++], "mlp_depth");
      r.gin_epsilon = parse_number<double>(f[c++], "gin_epsilon");
      r.epsilon = parse_number<double>(f[c++], "epsilon");
      r.population = parse_flip_population(f[c++]);
      r.base_seed = parse_number<std::uint64_t>(f[c++], "base_seed");
      r.seed_index = parse_number<int>(f[c++], "seed_index");
      r.repeat = parse_number<int>(f[c++], "repeat");
      r.fraction = parse_number<double>(f[c++], "fraction");
      r.layer = LayerTarget::parse(f[c++]);
      r.field = parse_bit_field(f[c++]);
      r.model_seed = parse_number<std::uint64_t>(f[c++], "model_seed");
      r.run_seed = parse_number<std::uint64_t>(f[c++], "run_seed");
      r.s_wl = parse_number<double>(f[c++], "s_wl");
      r.homophily = parse_number<double>(f[c++], "homophily");
      r.feature_dim = parse_number<int>(f[c++], "feature_dim");
      r.eligible = parse_number<std::size_t>(f[c++], "eligible");
      r.applied = parse_number<std::size_t>(f[c++], "applied");
      r.certified_pairs = parse_number<std::size_t>(f[c++], "certified_pairs");
      r.clean_exp = parse_number<double>(f[c++], "clean_exp");
      r.clean_m = parse_number<double>(f[c++], "clean_m");
      r.clean_s_gnn = parse_number<double>(f[c++], "clean_s_gnn");
      r.attacked_exp = parse_number<double>(f[c++], "attacked_exp");
      r.attacked_m = parse_number<double>(f[c++], "attacked_m");
      r.attacked_s_gnn = parse_number<double>(f[c++], "attacked_s_gnn");
      r.delta.exp = parse_number<double>(f[c++], "delta_exp");
      r.delta.m_cumulative = parse_number<double>(f[c++], "delta_m");
      r.delta.s_gnn_cumulative = parse_number<double>(f[c++], "delta_s_gnn");
      const auto status = f[c++];
      if (status != "ok" && status != "error") throw ConfigError("status must be ok or error");
      r.ok = status == "ok";
      r.error = f[c++];
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw FormatError(source, lineno, e.what());
    }
  }
  return out;
}

std::vector<RunResult> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return read_csv(in, path.string());
}

// ---- correlation ----

CorrelationTable correlate_results(const std::vector<RunResult>& results) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::vector<const RunResult*>> strata;
  std::vector<const RunResult*> pooled;
  for (const auto& r : results) {
    if (!r.ok) continue;
    strata[{to_string(r.field), to_string(r.activation), r.layer.to_string()}].push_back(&r);
    pooled.push_back(&r);
  }

  struct Property {
    const char* name;
    double (*get)(const RunResult&);
  };
  static const Property properties[] = {
      {"dM", [](const RunResult& r) { return r.delta.m_cumulative; }},
      {"dS_GNN", [](const RunResult& r) { return r.delta.s_gnn_cumulative; }},
      {"H_D", [](const RunResult& r) { return r.homophily; }},
      {"feature_dim", [](const RunResult& r) { return static_cast<double>(r.feature_dim); }},
      {"S_WL", [](const RunResult& r) { return r.s_wl; }},
  };

  CorrelationTable table;
  auto add = [&](const std::string& name, const std::vector<const RunResult*>& rows) {
    if (rows.size() < 3) {
      table.notices.push_back("skipped " + name + ": " + std::to_string(rows.size()) + " rows, need 3");
      return;
    }
    std::vector<double> y;
    for (const auto* r : rows) y.push_back(r->delta.exp);
    for (const auto& p : properties) {
      std::vector<double> x;
      for (const auto* r : rows) x.push_back(p.get(*r));
      table.rows.push_back({name, p.name, spearman(x, y), pearson(x, y)});
    }
  };
  for (const auto& [key, rows] : strata)
    add("field=" + std::get<0>(key) + " activation=" + std::get<1>(key) + " layer=" + std::get<2>(key), rows);
  add("pooled", pooled);
  return table;
}

void print_correlations(const CorrelationTable& table, std::ostream& out) {
  auto cell = [](const CorrelationResult& c) {
    if (c.undefined) return std::string("undefined (constant series)");
    std::ostringstream s;
    s << fixed(c.coefficient) << " (p=" << format_double(c.p_value) << ")";
    return s.str();
  };
  out << "stratum | property vs dExp | n | spearman | pearson\n";
  for (const auto& r : table.rows)
    out << r.stratum << " | " << r.property << " | " << r.spearman.n << " | " << cell(r.spearman) << " | "
        << cell(r.pearson) << '\n';
  for (const auto& n : table.notices) out << "note: " << n << '\n';
}

// ---- report ----

DatasetBounds dataset_bounds(const GraphDataset& dataset, std::int64_t hidden) {
  DatasetBounds b;
  b.stats = dataset_stats(dataset);
  b.g = dataset.label_alphabet_size;
  b.m = hidden;
  b.first_layer = first_layer_bound(b.stats.max_degree, b.g, hidden);
  b.homophily = homophily_bound(b.stats, b.g, hidden);
  return b;
}

namespace {

struct Moments {
  double mean = 0, sd = 0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (const double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (const double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

using GroupKey = std::tuple<std::string, std::string, std::string, std::string>;

struct Cell {
  std::vector<double> exp, dexp, applied;
};

std::map<GroupKey, std::map<double, Cell>> group(const std::vector<RunResult>& results, std::size_t& errors) {
  std::map<GroupKey, std::map<double, Cell>> groups;
  errors = 0;
  for (const auto& r : results) {
    if (!r.ok) {
      ++errors;
      continue;
    }
    auto& cell = groups[{to_string(r.architecture), to_string(r.activation), r.layer.to_string(),
                         to_string(r.field)}][r.fraction];
    cell.exp.push_back(r.attacked_exp);
    cell.dexp.push_back(r.delta.exp);
    cell.applied.push_back(static_cast<double>(r.applied));
  }
  return groups;
}

std::string group_title(const GroupKey& k) {
  return std::get<0>(k) + " / " + std::get<1>(k) + " / layer " + std::get<2>(k) + " / " + std::get<3>(k) + " bits";
}

}  // namespace

void emit_report(const std::vector<RunResult>& results, const std::optional<DatasetBounds>& bounds,
                 std::ostream& out) {
  std::size_t errors = 0;
  const auto groups = group(results, errors);
  out << "runs: " << results.size() << " (errors: " << errors << ")\n";
  if (!results.empty())
    out << "dataset: " << results.front().dataset << " (labels: " << to_string(results.front().label_source) << ")\n";
  for (const auto& [key, cells] : groups) {
    out << '\n' << group_title(key) << '\n';
    out << "  fraction | n  | Exp mean +- sd     | dExp mean +- sd    | flips\n";
    for (const auto& [fraction, cell] : cells) {
      const auto e = moments(cell.exp), d = moments(cell.dexp), a = moments(cell.applied);
      std::string pct = fixed(fraction * 100.0, 1) + "%";
      pct.resize(std::max<std::size_t>(pct.size(), 8), ' ');
      std::string n = std::to_string(cell.exp.size());
      n.resize(std::max<std::size_t>(n.size(), 2), ' ');
      out << "  " << pct << " | " << n << " | " << fixed(e.mean) << " +- " << fixed(e.sd) << " | "
          << fixed(d.mean) << " +- " << fixed(d.sd) << " | " << fixed(a.mean, 1) << '\n';
    }
  }
  if (bounds) {
    out << "\nfirst-layer flip bounds (m = " << bounds->m << ", g = " << bounds->g
        << ", max degree = " << bounds->stats.max_degree << ")\n";
    out << "  degree bound:    " << bounds->first_layer << " flips\n";
    out << "  homophily bound: " << bounds->homophily.flips << " flips (nz_H = " << fixed(bounds->homophily.nz_raw)
        << ", H_D = " << fixed(bounds->stats.homophily) << ", P_D = " << fixed(bounds->stats.connect_prob) << ")\n";
  }
  out << "\nnote: flip bounds count b = 32 bits per binary32 weight (ReLU variants need sign bits only); the\n"
         "random-flip probability bound uses 2^b possible values per weight and is reported in log space.\n";
}

void emit_svg(const std::vector<RunResult>& results, std::ostream& out) {
  std::size_t errors = 0;
  const auto groups = group(results, errors);
  std::vector<double> fractions;
  for (const auto& [key, cells] : groups)
    for (const auto& [f, cell] : cells) fractions.push_back(f);
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

  const double bar = 10, gap = 16, left = 50, top = 30, height = 200;
  const double series = std::max<double>(1, static_cast<double>(groups.size()));
  const double group_w = series * bar + gap;
  const double width = left + group_w * static_cast<double>(std::max<std::size_t>(1, fractions.size())) + 20;
  const double total_h = top + height + 40 + 14 * series;
  static const char* palette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\""
      << fixed(total_h, 0) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<text x=\"" << fixed(left, 0) << "\" y=\"16\">mean attacked Exp per flip fraction (whiskers: sd)</text>\n";
  out << "<line x1=\"" << fixed(left, 0) << "\" y1=\"" << fixed(top + height, 0) << "\" x2=\"" << fixed(width - 10, 0)
      << "\" y2=\"" << fixed(top + height, 0) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = top + height * (1.0 - t / 4.0);
    out << "<text x=\"" << fixed(left - 30, 0) << "\" y=\"" << fixed(y + 3, 1) << "\">" << fixed(t / 4.0, 2)
        << "</text>\n";
  }
  std::size_t s = 0;
  for (const auto& [key, cells] : groups) {
    const char* colour = palette[s % (sizeof palette / sizeof *palette)];
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      const auto it = cells.find(fractions[fi]);
      if (it == cells.end()) continue;
      const auto m = moments(it->second.exp);
      const double x = left + static_cast<double>(fi) * group_w + gap / 2 + static_cast<double>(s) * bar;
      const double h = std::clamp(m.mean, 0.0, 1.0) * height;
      out << "<rect x=\"" << fixed(x, 1) << "\" y=\"" << fixed(top + height - h, 1) << "\" width=\"" << fixed(bar - 1, 1)
          << "\" height=\"" << fixed(h, 1) << "\" fill=\"" << colour << "\"/>\n";
      const double lo = std::clamp(m.mean - m.sd, 0.0, 1.0), hi = std::clamp(m.mean + m.sd, 0.0, 1.0);
      out << "<line x1=\"" << fixed(x + bar / 2, 1) << "\" y1=\"" << fixed(top + height * (1 - lo), 1) << "\" x2=\""
          << fixed(x + bar / 2, 1) << "\" y2=\"" << fixed(top + height * (1 - hi), 1) << "\" stroke=\"black\"/>\n";
    }
    out << "<rect x=\"" << fixed(left, 0) << "\" y=\"" << fixed(top + height + 30 + 14 * static_cast<double>(s), 0)
        << "\" width=\"8\" height=\"8\" fill=\"" << colour << "\"/><text x=\"" << fixed(left + 12, 0) << "\" y=\""
        << fixed(top + height + 38 + 14 * static_cast<double>(s), 0) << "\">" << group_title(key) << "</text>\n";
    ++s;
  }
  for (std::size_t fi = 0; fi < fractions.size(); ++fi)
    out << "<text x=\"" << fixed(left + static_cast<double>(fi) * group_w + gap / 2, 1) << "\" y=\""
        << fixed(top + height + 14, 0) << "\">" << fixed(fractions[fi] * 100.0, 0) << "%</text>\n";
  out << "</svg>\n";
}

}  // namespace wlflip
