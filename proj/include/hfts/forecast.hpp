#pragma once

#include <string>
#include <vector>

#include "hfts/depth.hpp"
#include "hfts/hierarchy.hpp"

// One-step-ahead forecasting with moving windows. The aggregated-median
// forecaster predicts a leaf by the functional median of its own window and
// an internal node by the sum of its children's window medians; the moving
// mean uses window means in the same structure.

namespace hfts {

enum class ForecastMethod { AggregatedMedian, MovingMean };

inline const char* to_string(ForecastMethod method) {
  return method == ForecastMethod::AggregatedMedian ? "aggregated-median" : "moving-mean";
}

struct ForecastConfig {
  Index window = 10;
  DepthKind depth = DepthKind::MBD;
  ForecastMethod method = ForecastMethod::AggregatedMedian;
};

namespace detail {

template <typename Scalar>
void check_window(const FunctionalTimeSeries<Scalar>& series, Index n, Index k) {
  if (k < 1) throw DataError("forecast: window length must be positive");
  if (n > series.size()) throw DataError("forecast: index beyond series end");
  if (n < k)
    throw DataError("forecast: insufficient history (need " + std::to_string(k) +
                    " observations, have " + std::to_string(n) + ")");
}

}  // namespace detail

/// Median of the window {x_{n-k+1}, ..., x_n}; n counts observations (1-based),
/// so the result is the forecast for index n+1.
template <typename Scalar>
Vector<Scalar> moving_median_forecast(const FunctionalTimeSeries<Scalar>& series, Index n,
                                      Index k, DepthKind kind) {
  detail::check_window(series, n, k);
  return functional_median(series.window(n - k, k), kind);
}

/// Pointwise mean of the same window; the comparison baseline.
template <typename Scalar>
Vector<Scalar> moving_mean_forecast(const FunctionalTimeSeries<Scalar>& series, Index n, Index k) {
  detail::check_window(series, n, k);
  return series.values().middleRows(n - k, k).colwise().mean().transpose();
}

/// Forecast for index n+1 at every node, indexed like the hierarchy's nodes.
/// Leaves use their own window; internal nodes sum the window forecasts of
/// their children's observed series.
template <typename Scalar>
std::vector<Vector<Scalar>> hierarchical_forecast(const HierarchyData<Scalar>& data, Index n,
                                                  const ForecastConfig& cfg) {
  const HierarchySpec& spec = data.spec();
  const int v_count = spec.node_count();
  std::vector<Vector<Scalar>> own(static_cast<std::size_t>(v_count));
  for (int v = 0; v < v_count; ++v) {
    if (v == spec.root() && !spec.is_leaf(v)) continue;  // an internal root's own window is unused
    own[static_cast<std::size_t>(v)] =
        cfg.method == ForecastMethod::MovingMean
            ? moving_mean_forecast(data.series(v), n, cfg.window)
            : moving_median_forecast(data.series(v), n, cfg.window, cfg.depth);
  }
  std::vector<Vector<Scalar>> out(static_cast<std::size_t>(v_count));
  for (int v = 0; v < v_count; ++v) {
    if (spec.is_leaf(v)) {
      out[static_cast<std::size_t>(v)] = own[static_cast<std::size_t>(v)];
      continue;
    }
    Vector<Scalar> sum = Vector<Scalar>::Zero(data.grid().size());
    for (int c : spec.children(v)) sum += own[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(v)] = std::move(sum);
  }
  return out;
}

template <typename Scalar = double>
struct BacktestOccasion {
  Index n;                               // forecast made after observation n, targets n+1
  std::vector<Vector<Scalar>> forecast;  // by node index
  std::vector<Vector<Scalar>> actual;    // realized curves at n+1, by node index
};

/// Rolling one-step evaluation: for n = k, ..., N-1 forecast index n+1 at
/// every node and pair it with the realized curve.
template <typename Scalar>
std::vector<BacktestOccasion<Scalar>> rolling_backtest(const HierarchyData<Scalar>& data,
                                                       const ForecastConfig& cfg) {
  const Index n_obs = data.length();
  if (n_obs <= cfg.window)
    throw DataError("backtest: need more observations than the window length");
  std::vector<BacktestOccasion<Scalar>> out;
  out.reserve(static_cast<std::size_t>(n_obs - cfg.window));
  for (Index n = cfg.window; n < n_obs; ++n) {
    BacktestOccasion<Scalar> occ;
    occ.n = n;
    occ.forecast = hierarchical_forecast(data, n, cfg);
    occ.actual.reserve(static_cast<std::size_t>(data.spec().node_count()));
    for (int v = 0; v < data.spec().node_count(); ++v)
      occ.actual.push_back(data.series(v).curve(n));
    out.push_back(std::move(occ));
  }
  return out;
}

}  // namespace hfts
