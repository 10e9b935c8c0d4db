#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wlflip/errors.hpp"
#include "wlflip/seed.hpp"
#include "wlflip/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace wlflip;

namespace {

// naive reference implementations
double ref_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

std::vector<double> ref_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (const double v : x) less += v < x[i], equal += v == x[i];
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

// I_x(a, b) for integer a, b as a binomial tail
double binomial_beta(int a, int b, double x) {
  const int n = a + b - 1;
  double s = 0;
  for (int j = a; j <= n; ++j) s += std::exp(std::lgamma(n + 1) - std::lgamma(j + 1) - std::lgamma(n - j + 1)) * std::pow(x, j) * std::pow(1 - x, n - j);
  return s;
}

const std::vector<double> kX{1.2, 3.4, 2.2, 5.0, 4.1, 0.3, 2.2, 6.6};
const std::vector<double> kY{2.0, 1.0, 3.5, 4.0, 4.0, 0.5, 2.5, 7.0};

}  // namespace

TEST_CASE("incomplete beta against scipy") {
  struct Case { double a, b, x, want; };
  const Case cases[] = {
      {0.5, 0.5, 0.3, 0.36901011956554536}, {2, 3, 0.4, 0.5247999999999999},
      {5, 0.5, 0.9, 0.3166429150200122},    {10, 0.5, 0.2, 1.994982493613096e-08},
      {0.5, 10, 0.05, 0.6828484245344548},  {50, 0.5, 0.99, 0.3173043978741973},
      {1, 1, 0.7, 0.7},                     {3.5, 0.5, 0.999, 0.9356322688440224},
      {100, 0.5, 0.5, 6.255662994307364e-32}};
  for (const auto& c : cases) CHECK(incomplete_beta(c.a, c.b, c.x) == doctest::Approx(c.want).epsilon(1e-10));
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
}

TEST_CASE("incomplete beta against the binomial tail") {
  for (int a = 1; a <= 12; ++a)
    for (int b = 1; b <= 12; ++b)
      for (const double x : {0.05, 0.3, 0.5, 0.77, 0.95}) CHECK(std::abs(incomplete_beta(a, b, x) - binomial_beta(a, b, x)) < 1e-12);
}

TEST_CASE("t-based p values against scipy") {
  CHECK(correlation_p_value(0.5, 10) == doctest::Approx(0.14111328125000003).epsilon(1e-10));
  CHECK(correlation_p_value(0.9, 5) == doctest::Approx(0.03738607346849863).epsilon(1e-10));
  CHECK(correlation_p_value(0.1, 100) == doctest::Approx(0.32221736303061965).epsilon(1e-10));
  CHECK(correlation_p_value(0.5209, 1000) == doctest::Approx(1.2168628111094185e-70).epsilon(1e-8));
  CHECK(correlation_p_value(-0.3, 30) == doctest::Approx(0.10724594805795437).epsilon(1e-10));
  CHECK(correlation_p_value(1.0, 10) == 0.0);
}

TEST_CASE("frozen sample with ties") {
  const auto s = spearman(kX, kY);
  CHECK(s.coefficient == doctest::Approx(0.8433734939759037).epsilon(1e-12));
  CHECK(s.p_value == doctest::Approx(0.008512799127774816).epsilon(1e-10));
  CHECK(s.n == 8);
  const auto p = pearson(kX, kY);
  CHECK(p.coefficient == doctest::Approx(0.8433359623539125).epsilon(1e-12));
  CHECK(p.p_value == doctest::Approx(0.008518666599736165).epsilon(1e-10));
}

TEST_CASE("average ranks") {
  const std::vector<double> x{3, 1, 3, 2};
  CHECK(average_ranks(x) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("coefficients match the naive oracle") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + uniform_below(rng, 40);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse values so ties appear
      x[i] = static_cast<double>(uniform_below(rng, 12));
      y[i] = x[i] * (uniform_unit(rng) - 0.3) + static_cast<double>(uniform_below(rng, 5));
    }
    const auto p = pearson(x, y);
    const auto s = spearman(x, y);
    if (!p.undefined) CHECK(std::abs(p.coefficient - ref_pearson(x, y)) < 1e-12);
    if (!s.undefined) CHECK(std::abs(s.coefficient - ref_pearson(ref_ranks(x), ref_ranks(y))) < 1e-12);
  }
}

TEST_CASE("properties") {
  Rng rng(4);
  std::vector<double> x(30), y(30);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = uniform_unit(rng), y[i] = x[i] + 0.5 * uniform_unit(rng);
  const double rho = spearman(x, y).coefficient;

  std::vector<double> ex(x.size());
  std::transform(x.begin(), x.end(), ex.begin(), [](double v) { return std::exp(3 * v); });
  CHECK(spearman(ex, y).coefficient == doctest::Approx(rho).epsilon(1e-14));
  CHECK(spearman(y, x).coefficient == doctest::Approx(rho).epsilon(1e-14));
  CHECK(pearson(x, y).coefficient == doctest::Approx(pearson(y, x).coefficient).epsilon(1e-14));

  double last = 1.0;
  for (double r = 0.0; r < 1.0; r += 0.05) {
    const double p = correlation_p_value(r, 20);
    CHECK(p <= last);
    last = p;
  }

  std::vector<double> lin(10), line(10), sq(10);
  for (int i = 0; i < 10; ++i) lin[i] = i - 4.5, line[i] = 2 * lin[i] + 1, sq[i] = lin[i] * lin[i];
  CHECK(pearson(lin, line).coefficient == doctest::Approx(1.0));
  CHECK(spearman(lin, line).coefficient == doctest::Approx(1.0));
  CHECK(std::abs(pearson(lin, sq).coefficient) < 1e-12);
  CHECK(std::abs(spearman(lin, sq).coefficient) < 1e-12);
}

TEST_CASE("degenerate input") {
  const std::vector<double> flat(6, 2.0), x{1, 2, 3, 4, 5, 6};
  const auto r = spearman(flat, x);
  CHECK(r.undefined);
  CHECK(r.p_value == 1.0);
  CHECK(pearson(x, flat).undefined);
  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(spearman(two, two), ConfigError);
  CHECK_THROWS_AS(pearson(x, two), ConfigError);
}

TEST_CASE("exact permutation p value") {
  // perfect monotone pair of 5: only the two extreme orderings reach |rho| = 1
  const std::vector<double> a{1, 2, 3, 4, 5};
  CHECK(spearman_exact_p(a, a) == doctest::Approx(2.0 / 120.0));
  const std::vector<double> b{2, 1, 4, 3, 5};
  const double p = spearman_exact_p(a, b);
  CHECK(p > 0.0);
  CHECK(p <= 1.0);
}
