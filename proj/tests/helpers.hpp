#pragma once

#include <initializer_list>
#include <vector>

#include "hfts/core.hpp"
#include "hfts/simulate.hpp"

// Shared fixtures for the test suites.

namespace hfts::testing {

inline FunctionalSample<double> make_sample(const Grid<double>& grid,
                                            std::initializer_list<std::vector<double>> rows) {
  Matrix<double> values(static_cast<Index>(rows.size()), grid.size());
  Index i = 0;
  for (const auto& row : rows) {
    for (Index j = 0; j < grid.size(); ++j) values(i, j) = row[static_cast<std::size_t>(j)];
    ++i;
  }
  return FunctionalSample<double>(grid, values);
}

/// Series whose n-th curve is the constant levels[n].
inline FunctionalTimeSeries<double> constant_series(const Grid<double>& grid,
                                                    const std::vector<double>& levels) {
  Matrix<double> values(static_cast<Index>(levels.size()), grid.size());
  for (Index i = 0; i < values.rows(); ++i)
    values.row(i).setConstant(levels[static_cast<std::size_t>(i)]);
  return FunctionalTimeSeries<double>(grid, values);
}

/// Sample of i.i.d. standard normal values at every (curve, grid point).
inline FunctionalSample<double> white_noise_sample(const Grid<double>& grid, Index n, Rng& rng) {
  Matrix<double> values(n, grid.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < grid.size(); ++j) values(i, j) = rng.normal();
  return FunctionalSample<double>(grid, values);
}

/// Exponential covariance matrix C(s,t) = scale * exp(-rate * |s - t|).
inline Matrix<double> exp_cov_matrix(const Grid<double>& grid, double scale, double rate) {
  const Index m = grid.size();
  Matrix<double> cov(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      cov(i, j) = scale * std::exp(-rate * std::abs(grid[i] - grid[j]));
  return cov;
}

/// Draws from a Gaussian process with the given mean curve and covariance
/// Cholesky factor.
inline Vector<double> gp_draw(const Vector<double>& mean, const Matrix<double>& chol, Rng& rng) {
  Vector<double> z(mean.size());
  for (Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
  return mean + chol * z;
}

}  // namespace hfts::testing
