#pragma once

// Dense storage and the binary32 kernels shared by the forward engine, the
// metrics and the attack planners.

#include <Eigen/Core>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <type_traits>
#include <vector>

namespace wlflip {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix32 = Matrix<float>;
using RowVector32 = RowVector<float>;

/// Machine epsilon of binary32, the default distinguishability tolerance.
inline constexpr double kEpsMach = 1.19e-7;

template <typename Scalar>
using bits_t = std::conditional_t<sizeof(Scalar) == 4, std::uint32_t, std::uint64_t>;

template <typename Scalar>
bits_t<Scalar> scalar_bits(Scalar x) {
  return std::bit_cast<bits_t<Scalar>>(x);
}

/// Coordinates are close if bit-identical (covers equal infinities and
/// identical NaNs) or within `eps` in absolute value.
template <typename Scalar>
bool close(Scalar a, Scalar b, double eps) {
  if (scalar_bits(a) == scalar_bits(b)) return true;
  return std::abs(static_cast<double>(a) - static_cast<double>(b)) <= eps;
}

/// True if some coordinate is not close: the rows are delta-distinguishable.
template <typename DerivedA, typename DerivedB>
bool distinguishable(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                     double eps) {
  for (Eigen::Index c = 0; c < a.size(); ++c)
    if (!close(a(c), b(c), eps)) return true;
  return false;
}

/// Number of coordinates that are not close (the thresholded l0 distance).
template <typename DerivedA, typename DerivedB>
int l0_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                double eps) {
  int n = 0;
  for (Eigen::Index c = 0; c < a.size(); ++c)
    if (!close(a(c), b(c), eps)) ++n;
  return n;
}

template <typename DerivedA, typename DerivedB>
bool bit_equal(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index c = 0; c < a.size(); ++c)
    if (scalar_bits(a(c)) != scalar_bits(b(c))) return false;
  return true;
}

/// Strict lexicographic order on rows by the raw bit patterns of their
/// coordinates. Bit-equal rows compare equivalent.
template <typename DerivedA, typename DerivedB>
bool bit_less(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  for (Eigen::Index c = 0; c < a.size(); ++c) {
    const auto x = scalar_bits(a(c));
    const auto y = scalar_bits(b(c));
    if (x != y) return x < y;
  }
  return false;
}

/// Sequential dot product in the scalar type, ascending index, accumulator
/// starting at +0. No reassociation and no widening.
template <typename DerivedA, typename DerivedB>
auto ordered_dot(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Scalar acc = Scalar(0);
  for (Eigen::Index c = 0; c < a.size(); ++c) acc = acc + a(c) * b(c);
  return acc;
}

/// Sums the rows of `operands` in canonical order: rows are sorted by
/// `bit_less` and then added left to right onto +0. Equal multisets of rows
/// therefore produce bit-identical sums regardless of input order.
template <typename Derived>
RowVector<typename Derived::Scalar> canonical_row_sum(const Eigen::MatrixBase<Derived>& operands) {
  using Scalar = typename Derived::Scalar;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(operands.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return bit_less(operands.row(x), operands.row(y));
  });
  RowVector<Scalar> acc = RowVector<Scalar>::Zero(operands.cols());
  for (const auto r : order)
    for (Eigen::Index c = 0; c < operands.cols(); ++c) acc(c) = acc(c) + operands(r, c);
  return acc;
}

}  // namespace wlflip
