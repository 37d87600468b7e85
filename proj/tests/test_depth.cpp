#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "hfts/depth.hpp"
#include "helpers.hpp"

using namespace hfts;
using hfts::testing::constant_series;
using hfts::testing::make_sample;
using hfts::testing::white_noise_sample;

TEST_SUITE_BEGIN("depth");

TEST_CASE("hand examples: constants {0,1,2}") {
  const auto grid = Grid<double>::uniform(10);
  const auto sample = constant_series(grid, {0, 1, 2});
  for (const auto kind : {DepthKind::MBD, DepthKind::GBD}) {
    const auto d = depths(sample, kind);
    CHECK(d[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const auto reference = depths_oracle(sample, kind);
    CHECK((d - reference).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("hand example: 4-point grid with one crossing curve") {
  const auto grid = Grid<double>::uniform(4);
  const auto sample = make_sample(grid, {{0, 0, 0, 0}, {2, 2, 2, 2}, {1, 3, 1, 1}});
  // pair (x1,x2) contains x3 at points 1,3,4 -> 3/4; both own pairs are full
  CHECK(mbd(sample.curve(2), sample) == doctest::Approx(11.0 / 12.0).epsilon(1e-15));
  CHECK(mbd(sample.curve(2), sample) == doctest::Approx(0.9167).epsilon(5e-5));
  // longest run for pair (x1,x2) is points 3-4 -> 2/4
  CHECK(gbd(sample.curve(2), sample) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(gbd(sample.curve(2), sample) == doctest::Approx(0.8333).epsilon(5e-5));
  CHECK(gbd(sample.curve(2), sample) < mbd(sample.curve(2), sample));
}

TEST_CASE("two-curve samples") {
  const auto grid = Grid<double>::uniform(7);
  const auto sample = constant_series(grid, {1, 5});
  for (const auto kind : {DepthKind::MBD, DepthKind::GBD}) {
    const auto d = depths(sample, kind);
    CHECK(d[0] == 1.0);
    CHECK(d[1] == 1.0);
  }
  // two identical curves: degenerate bands still contain everything
  const auto twins = constant_series(grid, {3, 3});
  CHECK(depths(twins, DepthKind::MBD)[0] == 1.0);
  CHECK(depths(twins, DepthKind::GBD)[1] == 1.0);
}

TEST_CASE("mei examples") {
  const auto grid = Grid<double>::uniform(5);
  const auto sample = constant_series(grid, {0, 1, 2});
  CHECK(mei(sample.curve(1), sample) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(mei(sample.curve(0), sample) == doctest::Approx(1.0).epsilon(1e-15));
  const Vector<double> above = Vector<double>::Constant(5, 10.0);
  CHECK(mei(above, sample) == 0.0);
}

TEST_CASE("errors") {
  const auto grid = Grid<double>::uniform(5);
  const auto sample = constant_series(grid, {0, 1, 2});
  CHECK_THROWS_AS((void)mbd(Vector<double>::Ones(4).eval(), sample), DataError);
  const auto tiny = constant_series(grid, {1});
  CHECK_THROWS_AS((void)mbd(Vector<double>::Ones(5).eval(), tiny), DataError);
  CHECK_THROWS_AS((void)depths(tiny, DepthKind::MBD), DataError);
  const FunctionalSample<double> empty(grid, Matrix<double>(0, 5));
  CHECK_THROWS_AS((void)functional_median(empty, DepthKind::MBD), DataError);
}

TEST_CASE("optimized depths agree with the pair-enumeration oracle") {
  std::mt19937_64 sizes(2024);
  Rng rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 2 + static_cast<Index>(sizes() % 49);  // up to 50 curves
    const Index m = 2 + static_cast<Index>(sizes() % 99);  // up to 100 points
    const auto sample = white_noise_sample(Grid<double>::uniform(m), n, rng);
    for (const auto kind : {DepthKind::MBD, DepthKind::GBD}) {
      const auto fast = depths(sample, kind);
      const auto slow = depths_oracle(sample, kind);
      REQUIRE((fast - slow).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(fast.minCoeff() >= 0.0);
      CHECK(fast.maxCoeff() <= 1.0);
    }
    const auto m_depths = depths(sample, DepthKind::MBD);
    const auto g_depths = depths(sample, DepthKind::GBD);
    // GBD <= MBD always; members are never below 2/N
    CHECK((g_depths - m_depths).maxCoeff() <= 1e-12);
    CHECK(m_depths.minCoeff() >= 2.0 / static_cast<double>(n) - 1e-12);
  }
}

TEST_CASE("per-query depths match the member vectors") {
  Rng rng(5);
  const auto sample = white_noise_sample(Grid<double>::uniform(17), 9, rng);
  const auto m_depths = depths(sample, DepthKind::MBD);
  const auto g_depths = depths(sample, DepthKind::GBD);
  for (Index i = 0; i < sample.size(); ++i) {
    CHECK(mbd(sample.curve(i), sample) == doctest::Approx(m_depths[i]).epsilon(1e-15));
    CHECK(gbd(sample.curve(i), sample) == doctest::Approx(g_depths[i]).epsilon(1e-15));
  }
}

TEST_CASE("affine invariance") {
  Rng rng(17);
  const auto sample = white_noise_sample(Grid<double>::uniform(23), 12, rng);
  const auto base_mbd = depths(sample, DepthKind::MBD);
  const auto base_gbd = depths(sample, DepthKind::GBD);
  // exact transforms (powers of two) and a generic one, including a < 0
  for (const auto& [a, b] : {std::pair{0.25, 0.0}, {-8.0, 0.0}, {-1.75, 2.5}, {3.0, -10.0}}) {
    const FunctionalSample<double> mapped(sample.grid(),
                                          ((a * sample.values()).array() + b).matrix());
    const auto mapped_mbd = depths(mapped, DepthKind::MBD);
    const auto mapped_gbd = depths(mapped, DepthKind::GBD);
    CHECK(mapped_mbd == base_mbd);  // order relations are preserved, so counts match
    CHECK(mapped_gbd == base_gbd);
  }
}

TEST_CASE("permutation invariance") {
  Rng rng(29);
  const auto sample = white_noise_sample(Grid<double>::uniform(11), 8, rng);
  const auto base = depths(sample, DepthKind::MBD);
  std::vector<Index> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(99));
  Matrix<double> shuffled(8, 11);
  for (Index i = 0; i < 8; ++i) shuffled.row(i) = sample.values().row(perm[static_cast<std::size_t>(i)]);
  const auto permuted = depths(FunctionalSample<double>(sample.grid(), shuffled), DepthKind::MBD);
  for (Index i = 0; i < 8; ++i) CHECK(permuted[i] == base[perm[static_cast<std::size_t>(i)]]);
}

TEST_CASE("functional median: hand examples and tie rule") {
  const auto grid = Grid<double>::uniform(6);
  const auto sample = constant_series(grid, {0, 1, 2});
  for (const auto kind : {DepthKind::MBD, DepthKind::GBD})
    CHECK(functional_median(sample, kind).isApproxToConstant(1.0, 0.0));

  const auto single = constant_series(grid, {7});
  CHECK(functional_median(single, DepthKind::MBD).isApproxToConstant(7.0, 0.0));

  // both curves of a two-curve sample have depth 1: the median is their mean
  const auto pair = make_sample(grid, {{0, 0, 0, 0, 0, 0}, {1, 2, 3, 3, 2, 1}});
  const auto med = functional_median(pair, DepthKind::MBD);
  CHECK(med == (0.5 * (pair.curve(0) + pair.curve(1))).eval());
}

TEST_CASE("median of a symmetric sample is its center, exactly") {
  const auto grid = Grid<double>::uniform(19);
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    Vector<double> center(19);
    for (Index j = 0; j < 19; ++j) center[j] = rng.normal();
    Matrix<double> values(7, 19);
    values.row(0) = center.transpose();
    for (Index p = 0; p < 3; ++p) {
      Vector<double> delta(19);
      for (Index j = 0; j < 19; ++j) delta[j] = rng.normal();
      values.row(1 + 2 * p) = (center + delta).transpose();
      values.row(2 + 2 * p) = (center - delta).transpose();
    }
    const FunctionalSample<double> sample(grid, values);
    for (const auto kind : {DepthKind::MBD, DepthKind::GBD}) {
      const auto med = functional_median(sample, kind);
      CHECK(med == center);
    }
  }
}

TEST_SUITE_END();
