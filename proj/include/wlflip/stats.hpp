#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wlflip {

enum class CorrelationMethod { Spearman, Pearson };

const char* to_string(CorrelationMethod m);

struct CorrelationResult {
  double coefficient = 0;
  double p_value = 1;
  std::size_t n = 0;
  CorrelationMethod method = CorrelationMethod::Spearman;
  /// Set when either series is constant; coefficient and p are then
  /// placeholders (0 and 1), never NaN.
  bool undefined = false;
};

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided p of a correlation coefficient r over n samples via
/// t = r sqrt((n-2)/(1-r^2)) against Student-t with n-2 degrees of freedom.
double correlation_p_value(double r, std::size_t n);

/// Mean rank of each value, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> x);

/// Throws ConfigError when lengths differ or n < 3.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

/// Exact two-sided permutation p of Spearman's rho: the share of all n!
/// orderings of y whose |rho| reaches the observed one. n <= 10.
double spearman_exact_p(std::span<const double> x, std::span<const double> y);

}  // namespace wlflip
