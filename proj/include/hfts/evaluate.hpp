#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hfts/depth.hpp"
#include "hfts/forecast.hpp"
#include "hfts/hierarchy.hpp"

// Forecast-quality metrics and depth-based diagnostics: MAFE and MAD of
// integrated errors, functional boxplots, the outliergram, and scale curves.

namespace hfts {

namespace detail {

template <typename Scalar>
Scalar scalar_median(std::vector<Scalar> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / Scalar(2);
}

// Linear-interpolation quantile on sorted input (R type 7).
template <typename Scalar>
Scalar sorted_quantile(const std::vector<Scalar>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - std::floor(h);
  return static_cast<Scalar>((1.0 - frac) * static_cast<double>(sorted[lo]) +
                             frac * static_cast<double>(sorted[lo + 1]));
}

// Sample indices ordered by depth descending, index ascending on ties.
template <typename Scalar>
std::vector<Index> depth_order(const Vector<Scalar>& depth) {
  std::vector<Index> order(static_cast<std::size_t>(depth.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return depth[a] > depth[b]; });
  return order;
}

}  // namespace detail

/// Mean absolute forecast error over paired occasion rows and grid points.
template <typename Scalar>
Scalar mafe(const Matrix<Scalar>& forecasts, const Matrix<Scalar>& actuals) {
  if (forecasts.rows() == 0) throw DataError("mafe: no forecast occasions");
  if (forecasts.rows() != actuals.rows() || forecasts.cols() != actuals.cols())
    throw DataError("mafe: forecast/actual shapes differ");
  return (forecasts - actuals).cwiseAbs().mean();
}

/// Median absolute deviation (unscaled) of the trapezoid-integrated
/// per-occasion differences.
template <typename Scalar>
Scalar mad_integrated(const Grid<Scalar>& grid, const Matrix<Scalar>& forecasts,
                      const Matrix<Scalar>& actuals) {
  if (forecasts.rows() == 0) throw DataError("mad: no forecast occasions");
  if (forecasts.rows() != actuals.rows() || forecasts.cols() != actuals.cols())
    throw DataError("mad: forecast/actual shapes differ");
  std::vector<Scalar> diffs(static_cast<std::size_t>(forecasts.rows()));
  for (Index i = 0; i < forecasts.rows(); ++i)
    diffs[static_cast<std::size_t>(i)] = integrate(grid, (forecasts.row(i) - actuals.row(i)).eval());
  const Scalar center = detail::scalar_median(diffs);
  for (auto& d : diffs) d = std::abs(d - center);
  return detail::scalar_median(diffs);
}

template <typename Scalar = double>
struct BoxplotSummary {
  Vector<Scalar> lower, upper;              // 50% central region envelopes
  Vector<Scalar> fence_lower, fence_upper;  // envelope -/+ factor * region height
  Vector<Scalar> median;
  std::vector<Index> outliers;  // curves beyond a fence at >= 1 grid point
  Vector<Scalar> depths;
};

/// Depth-ranked functional boxplot. The central region is the pointwise
/// envelope of the ceil(N/2) deepest curves (curves tied with the boundary
/// depth are included); any curve leaving the fences is a magnitude outlier.
template <typename Scalar>
BoxplotSummary<Scalar> functional_boxplot(const FunctionalSample<Scalar>& sample, DepthKind kind,
                                          Scalar fence_factor = Scalar(1.5)) {
  const Index n = sample.size();
  if (n < 2) throw DataError("boxplot: sample too small (need at least 2 curves)");
  const auto& values = sample.values();
  BoxplotSummary<Scalar> box;
  box.depths = depths(sample, kind);
  const std::vector<Index> order = detail::depth_order(box.depths);
  const Index take = (n + 1) / 2;
  const Scalar boundary = box.depths[order[static_cast<std::size_t>(take - 1)]];

  box.lower = Vector<Scalar>::Constant(sample.grid_size(), std::numeric_limits<Scalar>::max());
  box.upper = Vector<Scalar>::Constant(sample.grid_size(), std::numeric_limits<Scalar>::lowest());
  for (Index i = 0; i < n; ++i) {
    if (box.depths[i] < boundary) continue;
    box.lower = box.lower.cwiseMin(values.row(i).transpose());
    box.upper = box.upper.cwiseMax(values.row(i).transpose());
  }
  const Vector<Scalar> height = box.upper - box.lower;
  box.fence_lower = box.lower - fence_factor * height;
  box.fence_upper = box.upper + fence_factor * height;
  box.median = detail::median_from_depths(values, box.depths);
  for (Index i = 0; i < n; ++i) {
    const auto row = values.row(i).transpose();
    if ((row.array() > box.fence_upper.array()).any() ||
        (row.array() < box.fence_lower.array()).any())
      box.outliers.push_back(i);
  }
  return box;
}

template <typename Scalar = double>
struct OutliergramResult {
  Vector<Scalar> mei;
  Vector<Scalar> mbd;
  Vector<Scalar> excess;  // parabola(mei) - mbd, >= 0 up to rounding on tie-free data
  std::vector<Index> flagged;
  std::array<Scalar, 3> parabola;  // a0 + a1 * e + a2 * e^2
};

/// Shape-outlier screen. For pairwise non-crossing curves the (MEI, MBD)
/// pairs lie exactly on a sample-size-dependent parabola; the distance below
/// it measures shape outlyingness, flagged by the Q3 + 1.5 IQR rule.
template <typename Scalar>
OutliergramResult<Scalar> outliergram(const FunctionalSample<Scalar>& sample) {
  const Index n = sample.size();
  if (n < 3) throw DataError("outliergram: sample too small (need at least 3 curves)");
  OutliergramResult<Scalar> result;
  result.mbd = depths(sample, DepthKind::MBD);
  result.mei.resize(n);
  for (Index i = 0; i < n; ++i) result.mei[i] = mei(sample.curve(i), sample);

  // Derivation from the non-crossing case: a curve strictly below p of the
  // N curves everywhere has MEI = (N-p)/N and MBD = 2/N + 2 p q / (N(N-1))
  // with q = N-1-p; eliminating p gives the coefficients below.
  const double nd = static_cast<double>(n);
  result.parabola = {static_cast<Scalar>(-2.0 / (nd * (nd - 1.0))),
                     static_cast<Scalar>(2.0 * (nd + 1.0) / (nd - 1.0)),
                     static_cast<Scalar>(-2.0 * nd / (nd - 1.0))};
  result.excess.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar e = result.mei[i];
    result.excess[i] =
        result.parabola[0] + result.parabola[1] * e + result.parabola[2] * e * e - result.mbd[i];
  }

  std::vector<Scalar> sorted(result.excess.data(), result.excess.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const Scalar q1 = detail::sorted_quantile(sorted, 0.25);
  const Scalar q3 = detail::sorted_quantile(sorted, 0.75);
  const Scalar fence = q3 + Scalar(1.5) * (q3 - q1);
  for (Index i = 0; i < n; ++i)
    if (result.excess[i] > fence) result.flagged.push_back(i);
  return result;
}

template <typename Scalar = double>
struct ScaleCurve {
  std::vector<std::pair<Scalar, Scalar>> points;  // (alpha, central-region volume)
};

/// Volume of the alpha-central region (envelope of the ceil(alpha*N) deepest
/// curves, in stable depth order) for each requested alpha.
template <typename Scalar>
ScaleCurve<Scalar> scale_curve(const FunctionalSample<Scalar>& sample, DepthKind kind,
                               const std::vector<Scalar>& alphas) {
  const Index n = sample.size();
  if (n < 2) throw DataError("scale curve: sample too small (need at least 2 curves)");
  const auto& values = sample.values();
  const std::vector<Index> order = detail::depth_order(depths(sample, kind));
  ScaleCurve<Scalar> curve;
  curve.points.reserve(alphas.size());
  for (const Scalar alpha : alphas) {
    if (!(alpha > Scalar(0)) || alpha > Scalar(1))
      throw ConfigError("scale curve: alpha must lie in (0, 1]");
    // ceil(alpha*N) with a guard against float fuzz on exact products
    auto take = static_cast<Index>(
        std::ceil(static_cast<double>(alpha) * static_cast<double>(n) - 1e-9));
    take = std::clamp<Index>(take, 1, n);
    Vector<Scalar> lower = values.row(order[0]).transpose();
    Vector<Scalar> upper = lower;
    for (Index r = 1; r < take; ++r) {
      const auto row = values.row(order[static_cast<std::size_t>(r)]).transpose();
      lower = lower.cwiseMin(row);
      upper = upper.cwiseMax(row);
    }
    curve.points.emplace_back(alpha, integrate(sample.grid(), (upper - lower).eval()));
  }
  return curve;
}

template <typename Scalar = double>
struct ErrorReport {
  struct NodeRow {
    std::string id;
    int depth = 0;
    Scalar mafe = Scalar(0);
    Scalar mad = Scalar(0);
  };
  struct LevelRow {
    int depth = 0;
    std::string label;
    Scalar mafe = Scalar(0);
  };
  std::vector<NodeRow> nodes;    // in hierarchy node order
  std::vector<LevelRow> levels;  // bottom level first, top level last
  std::vector<Matrix<Scalar>> errors;  // per node: occasions x grid of actual - forecast
};

/// Per-node MAFE and MAD over a completed backtest, with MAFE averaged over
/// the nodes of each level (level = distance from the root).
template <typename Scalar>
ErrorReport<Scalar> level_report(const HierarchySpec& spec, const Grid<Scalar>& grid,
                                 const std::vector<BacktestOccasion<Scalar>>& occasions) {
  ErrorReport<Scalar> report;
  if (occasions.empty()) throw DataError("report: no backtest occasions");
  const int v_count = spec.node_count();
  const auto n_occ = static_cast<Index>(occasions.size());
  report.nodes.reserve(static_cast<std::size_t>(v_count));
  report.errors.reserve(static_cast<std::size_t>(v_count));
  for (int v = 0; v < v_count; ++v) {
    Matrix<Scalar> forecast(n_occ, grid.size()), actual(n_occ, grid.size());
    for (Index o = 0; o < n_occ; ++o) {
      forecast.row(o) = occasions[static_cast<std::size_t>(o)].forecast[static_cast<std::size_t>(v)].transpose();
      actual.row(o) = occasions[static_cast<std::size_t>(o)].actual[static_cast<std::size_t>(v)].transpose();
    }
    typename ErrorReport<Scalar>::NodeRow row;
    row.id = spec.id(v);
    row.depth = spec.depth(v);
    row.mafe = mafe(forecast, actual);
    row.mad = mad_integrated(grid, forecast, actual);
    report.nodes.push_back(std::move(row));
    report.errors.push_back(actual - forecast);
  }
  for (int d = spec.max_depth(); d >= 0; --d) {
    Scalar sum = Scalar(0);
    int count = 0;
    for (const auto& row : report.nodes) {
      if (row.depth == d) {
        sum += row.mafe;
        ++count;
      }
    }
    if (count == 0) continue;
    report.levels.push_back({d, level_label(d, spec.max_depth()), sum / Scalar(count)});
  }
  return report;
}

}  // namespace hfts
