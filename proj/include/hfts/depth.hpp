#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "hfts/core.hpp"

// Band depths for functional samples on a common grid. Bands are limited by
// two sample curves; membership uses non-strict inequalities, and domain
// measure is grid-point counting, so MBD counts member points per pair and
// GBD counts the longest consecutive run of member points per pair. With
// these conventions GBD <= MBD holds exactly.

namespace hfts {

enum class DepthKind { MBD, GBD };

inline const char* to_string(DepthKind kind) {
  return kind == DepthKind::MBD ? "mbd" : "gbd";
}

namespace detail {

inline long long pair_count(long long n) { return n * (n - 1) / 2; }

// Number of unordered sample-curve pairs whose band contains value v at one
// grid point, given how many sample values sit strictly below and strictly
// above v. A pair misses v only when both its values are on one strict side,
// so the count is C(N,2) - C(below,2) - C(above,2). Pairs that include the
// queried curve itself are never excluded.
inline long long point_pairs(long long total, long long below, long long above) {
  return total - pair_count(below) - pair_count(above);
}

// Sorts by value; insertion sort wins at the window sizes the forecasters
// use, std::sort takes over for diagnostic-sized samples.
template <typename Scalar>
void sort_column(std::vector<std::pair<Scalar, Index>>& col) {
  if (col.size() <= 32) {
    for (std::size_t i = 1; i < col.size(); ++i) {
      const auto entry = col[i];
      std::size_t k = i;
      while (k > 0 && entry.first < col[k - 1].first) {
        col[k] = col[k - 1];
        --k;
      }
      col[k] = entry;
    }
    return;
  }
  std::sort(col.begin(), col.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

// MBD for every sample member in one pass: sort each grid column once, walk
// tie groups, and add the group's pair count to each member of the group.
template <typename Scalar>
Vector<Scalar> mbd_all(const Matrix<Scalar>& values) {
  const Index n = values.rows(), m = values.cols();
  const long long total = pair_count(n);
  std::vector<long long> acc(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<Scalar, Index>> col(static_cast<std::size_t>(n));
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = {values(i, j), i};
    sort_column(col);
    std::size_t lo = 0;
    while (lo < col.size()) {
      std::size_t hi = lo;
      while (hi < col.size() && col[hi].first == col[lo].first) ++hi;
      const long long cnt =
          point_pairs(total, static_cast<long long>(lo), static_cast<long long>(n) - static_cast<long long>(hi));
      for (std::size_t r = lo; r < hi; ++r) acc[static_cast<std::size_t>(col[r].second)] += cnt;
      lo = hi;
    }
  }
  Vector<Scalar> out(n);
  const double denom = static_cast<double>(total) * static_cast<double>(m);
  for (Index i = 0; i < n; ++i)
    out[i] = static_cast<Scalar>(static_cast<double>(acc[static_cast<std::size_t>(i)]) / denom);
  return out;
}

// Longest run of grid points where row `i` of `values` lies inside [lo, hi].
template <typename Scalar>
long long longest_run_inside(const Matrix<Scalar>& values, Index i,
                             const Vector<Scalar>& lo, const Vector<Scalar>& hi) {
  long long best = 0, run = 0;
  const Index m = values.cols();
  for (Index j = 0; j < m; ++j) {
    const Scalar v = values(i, j);
    if (lo[j] <= v && v <= hi[j]) {
      ++run;
      if (run > best) best = run;
    } else {
      run = 0;
    }
  }
  return best;
}

template <typename Scalar>
Vector<Scalar> gbd_all(const Matrix<Scalar>& values) {
  const Index n = values.rows(), m = values.cols();
  const long long total = pair_count(n);
  std::vector<long long> acc(static_cast<std::size_t>(n), 0);
  Vector<Scalar> lo(m), hi(m);
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      lo = values.row(a).cwiseMin(values.row(b)).transpose();
      hi = values.row(a).cwiseMax(values.row(b)).transpose();
      // the band's own curves are inside everywhere
      acc[static_cast<std::size_t>(a)] += m;
      acc[static_cast<std::size_t>(b)] += m;
      for (Index i = 0; i < n; ++i) {
        if (i == a || i == b) continue;
        acc[static_cast<std::size_t>(i)] += longest_run_inside(values, i, lo, hi);
      }
    }
  }
  Vector<Scalar> out(n);
  const double denom = static_cast<double>(total) * static_cast<double>(m);
  for (Index i = 0; i < n; ++i)
    out[i] = static_cast<Scalar>(static_cast<double>(acc[static_cast<std::size_t>(i)]) / denom);
  return out;
}

template <typename Scalar, typename Derived>
void check_query(const Eigen::MatrixBase<Derived>& x, const FunctionalSample<Scalar>& sample,
                 Index min_sample) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                "curve scalar must match sample scalar");
  if (x.size() != sample.grid_size())
    throw DataError("depth: curve length does not match the sample grid");
  if (sample.size() < min_sample)
    throw DataError("depth: sample too small (need at least " + std::to_string(min_sample) +
                    " curves)");
}

}  // namespace detail

/// Modified band depth of curve `x` with respect to `sample` (x may or may
/// not be a member). Average over curve pairs of the fraction of grid points
/// where x lies inside the pair's envelope.
template <typename Scalar, typename Derived>
Scalar mbd(const Eigen::MatrixBase<Derived>& x, const FunctionalSample<Scalar>& sample) {
  detail::check_query(x, sample, 2);
  const auto& values = sample.values();
  const Index n = values.rows(), m = values.cols();
  const long long total = detail::pair_count(n);
  long long acc = 0;
  for (Index j = 0; j < m; ++j) {
    const Scalar v = x(j);
    long long below = 0, above = 0;
    for (Index i = 0; i < n; ++i) {
      below += values(i, j) < v;
      above += values(i, j) > v;
    }
    acc += detail::point_pairs(total, below, above);
  }
  return static_cast<Scalar>(static_cast<double>(acc) /
                             (static_cast<double>(total) * static_cast<double>(m)));
}

/// Generalized band depth: like mbd, but each pair contributes only its
/// longest consecutive run of member grid points.
template <typename Scalar, typename Derived>
Scalar gbd(const Eigen::MatrixBase<Derived>& x, const FunctionalSample<Scalar>& sample) {
  detail::check_query(x, sample, 2);
  const auto& values = sample.values();
  const Index n = values.rows(), m = values.cols();
  long long acc = 0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      long long best = 0, run = 0;
      for (Index j = 0; j < m; ++j) {
        const Scalar v = x(j);
        const Scalar lo = std::min(values(a, j), values(b, j));
        const Scalar hi = std::max(values(a, j), values(b, j));
        if (lo <= v && v <= hi) {
          ++run;
          if (run > best) best = run;
        } else {
          run = 0;
        }
      }
      acc += best;
    }
  }
  return static_cast<Scalar>(static_cast<double>(acc) /
                             (static_cast<double>(detail::pair_count(n)) * static_cast<double>(m)));
}

/// Modified epigraph index: mean fraction of grid points at which sample
/// curves lie on or above `x`. Large for low-lying curves.
template <typename Scalar, typename Derived>
Scalar mei(const Eigen::MatrixBase<Derived>& x, const FunctionalSample<Scalar>& sample) {
  detail::check_query(x, sample, 1);
  const auto& values = sample.values();
  const Index n = values.rows(), m = values.cols();
  long long at_or_above = 0;
  for (Index j = 0; j < m; ++j) {
    const Scalar v = x(j);
    for (Index i = 0; i < n; ++i) at_or_above += values(i, j) >= v;
  }
  return static_cast<Scalar>(static_cast<double>(at_or_above) /
                             (static_cast<double>(n) * static_cast<double>(m)));
}

/// Depth of every sample member with respect to the whole sample.
template <typename Scalar>
Vector<Scalar> depths(const FunctionalSample<Scalar>& sample, DepthKind kind) {
  if (sample.size() < 2) throw DataError("depth: sample too small (need at least 2 curves)");
  return kind == DepthKind::MBD ? detail::mbd_all(sample.values())
                                : detail::gbd_all(sample.values());
}

/// Direct pair-enumeration transliteration of the depth definitions,
/// O(N^2 m) per curve. Validation reference for `depths`.
template <typename Scalar>
Vector<Scalar> depths_oracle(const FunctionalSample<Scalar>& sample, DepthKind kind) {
  if (sample.size() < 2) throw DataError("depth: sample too small (need at least 2 curves)");
  const auto& values = sample.values();
  const Index n = values.rows(), m = values.cols();
  Vector<Scalar> out(n);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index a = 0; a < n; ++a) {
      for (Index b = a + 1; b < n; ++b) {
        long long measure = 0;
        long long run = 0;
        for (Index j = 0; j < m; ++j) {
          const Scalar lo = std::min(values(a, j), values(b, j));
          const Scalar hi = std::max(values(a, j), values(b, j));
          const bool inside = lo <= values(i, j) && values(i, j) <= hi;
          if (kind == DepthKind::MBD) {
            measure += inside;
          } else {
            run = inside ? run + 1 : 0;
            if (run > measure) measure = run;
          }
        }
        sum += static_cast<double>(measure) / static_cast<double>(m);
      }
    }
    out[i] = static_cast<Scalar>(2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1)));
  }
  return out;
}

namespace detail {

// Mean of the depth-maximizing curves; maximizers are depths within 1e-12 of
// the maximum (depths are ratios of small integers, so exact ties are
// representable and the threshold only absorbs float noise).
template <typename Scalar>
Vector<Scalar> median_from_depths(const Matrix<Scalar>& values, const Vector<Scalar>& depth) {
  const Scalar dmax = depth.maxCoeff();
  Vector<Scalar> med = Vector<Scalar>::Zero(values.cols());
  Index hits = 0;
  for (Index i = 0; i < values.rows(); ++i) {
    if (dmax - depth[i] <= Scalar(1e-12)) {
      med += values.row(i).transpose();
      ++hits;
    }
  }
  return med / Scalar(hits);
}

}  // namespace detail

/// Deepest sample curve under the chosen depth; ties are resolved by the
/// pointwise mean of all maximizers. A one-curve sample is its own median.
template <typename Scalar>
Vector<Scalar> functional_median(const FunctionalSample<Scalar>& sample, DepthKind kind) {
  if (sample.size() == 0) throw DataError("functional_median: empty sample");
  if (sample.size() == 1) return sample.curve(0);
  return detail::median_from_depths(sample.values(), depths(sample, kind));
}

}  // namespace hfts
