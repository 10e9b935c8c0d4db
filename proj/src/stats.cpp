#include "wlflip/stats.hpp"

#include "wlflip/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wlflip {

const char* to_string(CorrelationMethod m) { return m == CorrelationMethod::Spearman ? "spearman" : "pearson"; }

namespace {

constexpr double kTolerance = 1e-12;
constexpr int kMaxIterations = 10000;

double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    f *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < kTolerance) break;
  }
  return f;
}

void check_series(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("correlation series differ in length");
  if (x.size() < 3) throw ConfigError("correlation needs at least 3 samples");
}

bool constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double product_moment(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult correlate(std::span<const double> x, std::span<const double> y, CorrelationMethod method) {
  CorrelationResult r;
  r.n = x.size();
  r.method = method;
  if (constant(x) || constant(y)) {
    r.undefined = true;
    return r;
  }
  r.coefficient = product_moment(x, y);
  r.p_value = correlation_p_value(r.coefficient, r.n);
  return r;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // the fraction converges fast only on one side of the mean
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  const double df = static_cast<double>(n - 2);
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  // t^2 = df r^2 / (1 - r^2), so df / (df + t^2) = 1 - r^2
  return std::clamp(incomplete_beta(df / 2.0, 0.5, 1.0 - r2), 0.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi + 1 < order.size() && x[order[hi + 1]] == x[order[lo]]) ++hi;
    const double mean = (static_cast<double>(lo) + static_cast<double>(hi)) / 2.0 + 1.0;
    for (std::size_t k = lo; k <= hi; ++k) ranks[order[k]] = mean;
    lo = hi + 1;
  }
  return ranks;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  check_series(x, y);
  return correlate(x, y, CorrelationMethod::Pearson);
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  check_series(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return correlate(rx, ry, CorrelationMethod::Spearman);
}

double spearman_exact_p(std::span<const double> x, std::span<const double> y) {
  check_series(x, y);
  if (x.size() > 10) throw ConfigError("exact permutation p is limited to n <= 10");
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  if (constant(rx) || constant(ry)) return 1.0;
  const double observed = std::abs(product_moment(rx, ry));
  std::sort(ry.begin(), ry.end());
  std::size_t hits = 0, total = 0;
  do {
    ++total;
    if (std::abs(product_moment(rx, ry)) >= observed - 1e-12) ++hits;
  } while (std::next_permutation(ry.begin(), ry.end()));
  // next_permutation skips duplicate orderings of tied ranks; each distinct
  // ordering stands for the same number of raw permutations, so the ratio holds
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace wlflip
