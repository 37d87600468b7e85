#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Core types for functional data sampled on a shared grid. A "curve" is the
// vector of its values at the grid points; samples and time series stack
// curves as rows of a dense matrix. Everything is immutable after
// construction and safe to share across threads.

namespace hfts {

using Index = Eigen::Index;

template <typename Scalar = double>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
using CurveT = Vector<Scalar>;

// Error taxonomy; the CLI maps these onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: flags, config documents, invalid parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad data: malformed files, shape/grid mismatches, insufficient samples.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numeric failure at run time (non-finite values and the like).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Strictly increasing sampling points t_0 < ... < t_{m-1}, m >= 2.
/// Carries cached trapezoid quadrature weights.
template <typename Scalar = double>
class Grid {
 public:
  explicit Grid(Vector<Scalar> points) : points_(std::move(points)) {
    const Index m = points_.size();
    if (m < 2) throw DataError("grid: need at least 2 points");
    if (!points_.allFinite()) throw DataError("grid: points must be finite");
    for (Index j = 0; j + 1 < m; ++j) {
      if (!(points_[j] < points_[j + 1]))
        throw DataError("grid: points must be strictly increasing");
    }
    weights_.resize(m);
    weights_[0] = (points_[1] - points_[0]) / Scalar(2);
    for (Index j = 1; j + 1 < m; ++j)
      weights_[j] = (points_[j + 1] - points_[j - 1]) / Scalar(2);
    weights_[m - 1] = (points_[m - 1] - points_[m - 2]) / Scalar(2);
  }

  static Grid uniform(Index m, Scalar t0 = Scalar(0), Scalar t1 = Scalar(1)) {
    if (m < 2) throw DataError("grid: need at least 2 points");
    if (!(t0 < t1)) throw DataError("grid: t0 must be below t1");
    return Grid(Vector<Scalar>::LinSpaced(m, t0, t1));
  }

  Index size() const { return points_.size(); }
  Scalar operator[](Index j) const { return points_[j]; }
  const Vector<Scalar>& points() const { return points_; }
  const Vector<Scalar>& quad_weights() const { return weights_; }
  Scalar t0() const { return points_[0]; }
  Scalar t1() const { return points_[points_.size() - 1]; }
  Scalar span() const { return t1() - t0(); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.points_.size() == b.points_.size() &&
           (a.points_.array() == b.points_.array()).all();
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  Vector<Scalar> points_;
  Vector<Scalar> weights_;
};

/// Trapezoid-rule integral of a curve over the grid span.
template <typename Scalar, typename Derived>
Scalar integrate(const Grid<Scalar>& grid, const Eigen::MatrixBase<Derived>& curve) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                "curve scalar must match grid scalar");
  if (curve.size() != grid.size())
    throw DataError("integrate: curve length does not match grid");
  if (!curve.allFinite())
    throw NumericError("integrate: curve has non-finite values");
  return grid.quad_weights().dot(curve);
}

/// N curves (rows) sampled on one grid (columns). N = 0 is representable;
/// individual operations state their own minimum sample sizes.
template <typename Scalar = double>
class FunctionalSample {
 public:
  FunctionalSample(Grid<Scalar> grid, Matrix<Scalar> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.cols() != grid_.size())
      throw DataError("sample: column count does not match grid size");
    if (!values_.allFinite())
      throw DataError("sample: values must be finite");
  }

  Index size() const { return values_.rows(); }
  Index grid_size() const { return grid_.size(); }
  const Grid<Scalar>& grid() const { return grid_; }
  const Matrix<Scalar>& values() const { return values_; }
  Vector<Scalar> curve(Index i) const { return values_.row(i).transpose(); }

  /// Copy of rows [first, first+count).
  FunctionalSample window(Index first, Index count) const {
    if (first < 0 || count < 1 || first + count > size())
      throw DataError("sample: window out of range");
    return FunctionalSample(grid_, values_.middleRows(first, count));
  }

 private:
  Grid<Scalar> grid_;
  Matrix<Scalar> values_;
};

// A functional time series is a sample whose row order is temporal.
template <typename Scalar = double>
using FunctionalTimeSeries = FunctionalSample<Scalar>;

/// Pointwise-in-t, index-wise-in-n sum of equally shaped series.
template <typename Scalar>
FunctionalTimeSeries<Scalar> sum_series(
    const std::vector<FunctionalTimeSeries<Scalar>>& list) {
  if (list.empty()) throw DataError("sum_series: empty list");
  const auto& first = list.front();
  Matrix<Scalar> acc = first.values();
  for (std::size_t i = 1; i < list.size(); ++i) {
    if (list[i].grid() != first.grid() || list[i].size() != first.size())
      throw DataError("sum_series: incompatible series");
    acc += list[i].values();
  }
  return FunctionalTimeSeries<Scalar>(first.grid(), std::move(acc));
}

}  // namespace hfts
