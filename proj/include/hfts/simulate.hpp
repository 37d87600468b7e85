#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hfts/hierarchy.hpp"

// Stochastic generators: Wiener paths, FAR(1) series driven by a normalized
// bivariate kernel, the contamination process, Bernoulli outlier planting,
// and full hierarchy datasets. All draws come from named substreams of one
// seed, so regenerating with a different contamination fraction leaves the
// base sample draws untouched.

namespace hfts {

/// Mixes a base seed with a stream name into an independent substream seed.
inline std::uint64_t substream(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;
  // splitmix64 finalize, twice
  for (int round = 0; round < 2; ++round) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
  }
  return z;
}

/// Deterministic generator: mt19937_64 uniforms with Box-Muller normals.
/// The same seed yields the same draw sequence on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Standard Wiener path on the grid: W(t_0) = 0, independent Gaussian
/// increments with variance t_{j+1} - t_j.
template <typename Scalar>
Vector<Scalar> wiener_path(const Grid<Scalar>& grid, Rng& rng) {
  const Index m = grid.size();
  Vector<Scalar> path(m);
  path[0] = Scalar(0);
  for (Index j = 1; j < m; ++j) {
    const double dt = static_cast<double>(grid[j] - grid[j - 1]);
    path[j] = path[j - 1] + static_cast<Scalar>(rng.normal() * std::sqrt(dt));
  }
  return path;
}

enum class KernelKind { SlopingS, SlopingT, Exponential };

inline const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::SlopingS: return "sloping-s";
    case KernelKind::SlopingT: return "sloping-t";
    default: return "exponential";
  }
}

/// Constant C giving the kernel Hilbert-Schmidt norm `target_norm` on [0,1]^2.
/// Closed forms: |Cs| and |Ct| integrate to C^2/3; C exp(-|s-t|/2) squares to
/// C^2 exp(-|s-t|) whose integral is 2/e.
inline double kernel_constant(KernelKind kind, double target_norm) {
  if (target_norm < 0) throw ConfigError("kernel: target norm must be non-negative");
  switch (kind) {
    case KernelKind::SlopingS:
    case KernelKind::SlopingT:
      return target_norm * std::sqrt(3.0);
    default:
      return target_norm / std::sqrt(2.0 / M_E);
  }
}

/// Bivariate kernel k(s, t) on [0,1]^2 with a fixed multiplicative constant.
struct KernelSpec {
  KernelKind kind = KernelKind::Exponential;
  double constant = 0.0;

  static KernelSpec normalized(KernelKind kind, double target_norm) {
    return {kind, kernel_constant(kind, target_norm)};
  }

  double value(double s, double t) const {
    switch (kind) {
      case KernelKind::SlopingS: return constant * s;
      case KernelKind::SlopingT: return constant * t;
      default: return constant * std::exp(-std::abs(s - t) / 2.0);
    }
  }

  double hs_norm() const {
    switch (kind) {
      case KernelKind::SlopingS:
      case KernelKind::SlopingT:
        return std::abs(constant) / std::sqrt(3.0);
      default:
        return std::abs(constant) * std::sqrt(2.0 / M_E);
    }
  }
};

/// Trapezoid discretization of the integral operator x(.) -> ∫ k(s, .) x(s) ds:
/// row i holds k(s_j, t_i) * w_j, so applying it is a matrix-vector product.
template <typename Scalar>
Matrix<Scalar> far1_operator_matrix(const KernelSpec& kernel, const Grid<Scalar>& grid) {
  const Index m = grid.size();
  const auto& w = grid.quad_weights();
  Matrix<Scalar> op(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      op(i, j) = static_cast<Scalar>(kernel.value(static_cast<double>(grid[j]),
                                                  static_cast<double>(grid[i]))) *
                 w[j];
  return op;
}

/// First-order functional autoregression X_{n+1} = Psi(X_n) + eps_{n+1} with
/// standard Wiener innovations, iterated from X_0 = 0 and trimmed by
/// `burn_in` initial curves. Requires a contracting kernel unless overridden.
template <typename Scalar>
FunctionalTimeSeries<Scalar> far1_series(const KernelSpec& kernel, Index n_obs,
                                         const Grid<Scalar>& grid, Rng& rng,
                                         Index burn_in = 50, bool allow_nonstationary = false) {
  if (n_obs < 1) throw ConfigError("far1: need at least one observation");
  if (burn_in < 0) throw ConfigError("far1: burn-in must be non-negative");
  if (!allow_nonstationary && kernel.hs_norm() >= 1.0)
    throw ConfigError("far1: kernel norm " + std::to_string(kernel.hs_norm()) +
                      " is not below 1 (nonstationary)");
  const Matrix<Scalar> op = far1_operator_matrix(kernel, grid);
  Vector<Scalar> state = Vector<Scalar>::Zero(grid.size());
  Matrix<Scalar> values(n_obs, grid.size());
  for (Index step = 0; step < burn_in + n_obs; ++step) {
    state = (op * state + wiener_path(grid, rng)).eval();
    if (step >= burn_in) values.row(step - burn_in) = state.transpose();
  }
  return FunctionalTimeSeries<Scalar>(grid, std::move(values));
}

/// Outlying-curve process 60 W1(t) sin(2 pi t) + sqrt(2) W2(t) cos(2 pi t)
/// with independent standard Wiener paths W1, W2.
template <typename Scalar>
Vector<Scalar> contamination_curve(const Grid<Scalar>& grid, Rng& rng) {
  const Vector<Scalar> w1 = wiener_path(grid, rng);
  const Vector<Scalar> w2 = wiener_path(grid, rng);
  const auto t = grid.points().array().template cast<double>();
  const auto f = 60.0 * w1.array().template cast<double>() * (2.0 * M_PI * t).sin() +
                 std::sqrt(2.0) * w2.array().template cast<double>() * (2.0 * M_PI * t).cos();
  return f.template cast<Scalar>().matrix();
}

template <typename Scalar = double>
struct ContaminationResult {
  FunctionalTimeSeries<Scalar> series;
  std::vector<Index> planted;  // ground-truth replaced indices, ascending
};

/// Replaces each observation independently with probability `fraction` by a
/// fresh contamination curve. Series length is preserved.
template <typename Scalar>
ContaminationResult<Scalar> contaminate(const FunctionalTimeSeries<Scalar>& series,
                                        double fraction, Rng& rng) {
  if (fraction < 0.0 || fraction > 1.0)
    throw ConfigError("contaminate: fraction must lie in [0, 1]");
  Matrix<Scalar> values = series.values();
  std::vector<Index> planted;
  for (Index i = 0; i < series.size(); ++i) {
    if (rng.uniform() < fraction) {
      values.row(i) = contamination_curve(series.grid(), rng).transpose();
      planted.push_back(i);
    }
  }
  return {FunctionalTimeSeries<Scalar>(series.grid(), std::move(values)), std::move(planted)};
}

enum class LeafProcess { Far1, ScaledWiener };

inline const char* to_string(LeafProcess process) {
  return process == LeafProcess::Far1 ? "far1" : "wiener";
}

struct SimulationSpec {
  HierarchySpec topology = HierarchySpec::fig4();
  LeafProcess leaf_process = LeafProcess::Far1;
  KernelSpec kernel = KernelSpec::normalized(KernelKind::Exponential, 0.5);
  Index n_obs = 100;
  Index grid_points = 100;
  double t0 = 0.0;
  double t1 = 1.0;
  double error_scale = 0.1;        // internal-node errors are error_scale * Wiener
  double wiener_leaf_scale = 10.0; // leaf scale for the ScaledWiener process
  double contamination = 0.0;      // leaf replacement probability
  Index burn_in = 50;
  Index replications = 30;         // experiment harnesses re-seed per replication
  bool allow_nonstationary = false;
};

template <typename Scalar = double>
struct SimulatedHierarchy {
  HierarchyData<Scalar> data;
  std::map<std::string, std::vector<Index>> planted;  // leaf id -> replaced indices
};

/// Generates leaf series, plants contamination at the leaves, and builds
/// every internal node as the sum of its children plus an independent
/// error_scale * Wiener error series. Deterministic in (spec, seed).
template <typename Scalar = double>
SimulatedHierarchy<Scalar> build_hierarchy_dataset(const SimulationSpec& spec,
                                                   std::uint64_t seed) {
  if (spec.n_obs < 1) throw ConfigError("simulate: n_obs must be positive");
  const Grid<Scalar> grid = Grid<Scalar>::uniform(spec.grid_points, static_cast<Scalar>(spec.t0),
                                                  static_cast<Scalar>(spec.t1));
  std::map<std::string, FunctionalTimeSeries<Scalar>> leaves;
  std::map<std::string, std::vector<Index>> planted;
  for (int v : spec.topology.leaves()) {
    const std::string& id = spec.topology.id(v);
    Rng rng(substream(seed, "leaf/" + id));
    FunctionalTimeSeries<Scalar> series = [&] {
      if (spec.leaf_process == LeafProcess::Far1)
        return far1_series(spec.kernel, spec.n_obs, grid, rng, spec.burn_in,
                           spec.allow_nonstationary);
      Matrix<Scalar> values(spec.n_obs, grid.size());
      for (Index i = 0; i < spec.n_obs; ++i)
        values.row(i) =
            (wiener_path(grid, rng) * static_cast<Scalar>(spec.wiener_leaf_scale)).transpose();
      return FunctionalTimeSeries<Scalar>(grid, std::move(values));
    }();
    if (spec.contamination > 0.0) {
      Rng contam_rng(substream(seed, "contam/" + id));
      auto result = contaminate(series, spec.contamination, contam_rng);
      series = std::move(result.series);
      if (!result.planted.empty()) planted.emplace(id, std::move(result.planted));
    }
    leaves.emplace(id, std::move(series));
  }

  std::map<std::string, FunctionalTimeSeries<Scalar>> errors;
  for (int v = 0; v < spec.topology.node_count(); ++v) {
    if (spec.topology.is_leaf(v)) continue;
    const std::string& id = spec.topology.id(v);
    Rng rng(substream(seed, "err/" + id));
    Matrix<Scalar> values(spec.n_obs, grid.size());
    for (Index i = 0; i < spec.n_obs; ++i)
      values.row(i) = (wiener_path(grid, rng) * static_cast<Scalar>(spec.error_scale)).transpose();
    errors.emplace(id, FunctionalTimeSeries<Scalar>(grid, std::move(values)));
  }

  return {fill_internal_series(spec.topology, leaves, errors), std::move(planted)};
}

}  // namespace hfts
