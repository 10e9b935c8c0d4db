#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "tempdir.hpp"
#include "wlflip/errors.hpp"
#include "wlflip/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace wlflip;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.dataset_path = fixtures::data_dir() / "DESK";
  c.dataset_name = "DESK";
  c.hidden = 8;
  c.depth = 2;
  c.model_seeds = 2;
  c.repeats = 2;
  c.fractions = {0.1, 0.5};
  c.bit_fields = {BitField::Sign, BitField::Mantissa};
  return c;
}

std::string csv_of(const std::vector<RunResult>& r) {
  std::ostringstream out;
  emit_csv(r, out);
  return out.str();
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "/base");
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse(
      "# sweep\n"
      "dataset_path = data\n"
      "dataset_name = DESK\n"
      "activation = sigmoid\n"
      "fractions = 5%, 0.5\n"
      "target_layers = 1, 2.2\n"
      "bit_fields = sign\n");
  CHECK(c.dataset_path == std::filesystem::path("/base/data"));
  CHECK(c.activation == Activation::Sigmoid);
  REQUIRE(c.fractions.size() == 2);
  CHECK(c.fractions[0] == doctest::Approx(0.05));
  CHECK(c.target_layers[1].to_string() == "2.2");

  std::ostringstream round;
  write_config(c, round);
  std::istringstream back(round.str());
  const auto c2 = parse_config(back);
  CHECK(c2.fractions == c.fractions);
  CHECK(c2.dataset_name == c.dataset_name);
}

TEST_CASE("config errors carry line numbers") {
  try {
    parse("dataset_name = X\nbogus = 1\n");
    FAIL("expected an error");
  } catch (const FormatError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse("dataset_name = X\nfractions = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("dataset_name = X\nfractions = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("dataset_name = X\ndepth = 2\ntarget_layers = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("dataset_name = X\nhidden = many\n"), FormatError);
  CHECK_THROWS_AS(parse("depth = 2\n"), ConfigError);
}

TEST_CASE("one run per grid point") {
  auto c = tiny_config();
  c.model_seeds = 1;
  c.repeats = 1;
  c.fractions = {0.3};
  c.bit_fields = {BitField::Exponent};
  const auto r = run_experiment(c);
  REQUIRE(r.size() == 1);
  CHECK(r[0].ok);
  CHECK(r[0].applied == static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(r[0].eligible))));
}

TEST_CASE("sweep is deterministic and thread-independent") {
  auto c = tiny_config();
  const auto a = run_experiment(c);
  CHECK(a.size() == 2u * 2u * 2u * 2u);
  c.threads = 3;
  const auto b = run_experiment(c);
  CHECK(csv_of(a) == csv_of(b));
  for (const auto& r : a) {
    CHECK(r.ok);
    CHECK(r.applied == flips_for(r.fraction, r.eligible));
  }
}

TEST_CASE("csv round trip") {
  const auto results = run_experiment(tiny_config());
  const auto text = csv_of(results);
  std::istringstream in(text);
  const auto back = read_csv(in);
  REQUIRE(back.size() == results.size());
  CHECK(csv_of(back) == text);

  CHECK(csv_of({}) == csv_header() + "\n");
  std::istringstream wrong("format_version,nope\n");
  CHECK_THROWS_AS(read_csv(wrong), FormatError);
  std::istringstream truncated(csv_header() + "\n1,DESK\n");
  try {
    read_csv(truncated);
    FAIL("expected an error");
  } catch (const FormatError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("csv file output") {
  TempDir dir;
  const auto results = run_experiment(tiny_config());
  emit_csv(results, dir.path / "r.csv");
  CHECK(csv_of(read_csv(dir.path / "r.csv")) == csv_of(results));
  CHECK_THROWS_AS(read_csv(dir.path / "missing.csv"), DataError);
}

TEST_CASE("correlation over results") {
  auto rows = run_experiment(tiny_config());
  // dM mirrors dExp exactly
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].delta.exp = 0.01 * static_cast<double>(i);
    rows[i].delta.m_cumulative = 0.02 * static_cast<double>(i);
  }
  const auto t = correlate_results(rows);
  bool seen = false;
  for (const auto& r : t.rows)
    if (r.stratum == "pooled" && r.property == "dM") {
      seen = true;
      CHECK(r.spearman.coefficient == doctest::Approx(1.0));
    }
  CHECK(seen);

  for (auto& r : rows) r.delta.exp = 0.0;
  for (const auto& r : correlate_results(rows).rows) CHECK(r.spearman.undefined);
  std::ostringstream out;
  print_correlations(correlate_results(rows), out);
  CHECK_FALSE(out.str().empty());
}

TEST_CASE("report text") {
  const auto results = run_experiment(tiny_config());
  const auto ds = parse_tudataset(fixtures::data_dir() / "DESK", "DESK");
  std::ostringstream out, svg;
  emit_report(results, dataset_bounds(ds, 8), out);
  CHECK(out.str().find("sign") != std::string::npos);
  emit_svg(results, svg);
  CHECK(svg.str().rfind("<svg", 0) == 0);
}

TEST_CASE("shortest double formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
