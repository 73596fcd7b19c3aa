#include <doctest.h>

#include <cmath>

#include "indivar/estimate.hpp"
#include "indivar/simulate.hpp"

using namespace indivar;

namespace {

RealizationEnsemble linear_field_1d(int nx, double spacing) {
  RealizationEnsemble ens;
  ens.space = SpaceRef::euclidean(2);
  ens.grid = GridSpec(nx, 1, spacing);
  ens.binary = false;
  ens.values.assign(1, std::vector<double>(nx));
  for (int i = 0; i < nx; ++i) ens.values[0][i] = i * spacing;
  return ens;
}

}  // namespace

TEST_CASE("lag bin validation") {
  CHECK_THROWS_AS(LagBins::at({1.0, 1.5}, 0.4), input_error);   // overlap
  CHECK_THROWS_AS(LagBins::at({-1.0, 1.0}, 0.1), input_error);  // negative
  CHECK_NOTHROW(LagBins::grid_axis(5, 2.0));
}

TEST_CASE("deterministic linear field") {
  const auto ens = linear_field_1d(50, 1.0);
  const auto bins = LagBins::grid_axis(5, 1.0);
  const auto v2 = experimental_variogram(ens, bins, 2.0);
  const auto v1 = experimental_variogram(ens, bins, 1.0);
  for (int b = 0; b < 5; ++b) {
    const double h = bins.centers[b];
    CHECK(v2.average[b].estimate == doctest::Approx(h * h / 2).epsilon(1e-12));
    CHECK(v1.average[b].estimate == doctest::Approx(h / 2).epsilon(1e-12));
    CHECK(v2.average[b].pair_count == 50 - b - 1);
  }
}

TEST_CASE("constant field estimates zero") {
  RealizationEnsemble ens;
  ens.space = SpaceRef::euclidean(2);
  ens.grid = GridSpec(20, 10, 1.0);
  ens.binary = true;
  ens.values.assign(3, std::vector<double>(200, 1.0));
  const auto curve = experimental_variogram(ens, LagBins::grid_axis(4, 1.0), 1.0);
  for (const auto& b : curve.average) CHECK(b.estimate == 0.0);
  CHECK(curve.per_realization.size() == 3);
}

TEST_CASE("binary ensembles are order-invariant, exactly") {
  RealizationEnsemble ens;
  ens.space = SpaceRef::euclidean(2);
  ens.grid = GridSpec(16, 16, 1.0);
  ens.binary = true;
  CounterRng rng(0xBEEF, 0);
  ens.values.assign(5, std::vector<double>(256));
  for (auto& v : ens.values)
    for (auto& x : v) x = (rng.next_u64() & 1) ? 1.0 : 0.0;
  const auto bins = LagBins::grid_axis(5, 1.0);
  const auto a = experimental_variogram(ens, bins, 2.0);
  const auto b = experimental_variogram(ens, bins, 0.7);
  const auto c = experimental_variogram(ens, bins, 1.0);
  for (std::size_t i = 0; i < a.average.size(); ++i) {
    CHECK(a.average[i].estimate == b.average[i].estimate);
    CHECK(a.average[i].estimate == c.average[i].estimate);
  }
}

TEST_CASE("point-set ensembles bin by host distance") {
  RealizationEnsemble ens;
  ens.space = SpaceRef::euclidean(1);
  ens.points = {Point::at({0.0}), Point::at({1.0}), Point::at({3.0})};
  ens.binary = false;
  ens.values = {{0.0, 2.0, 6.0}};
  const auto curve =
      experimental_variogram(ens, LagBins::at({1.0, 2.0, 3.0}, 0.25), 2.0);
  // pairs: (0,1) lag 1 dz 2; (1,2) lag 2 dz 4; (0,2) lag 3 dz 6
  REQUIRE(curve.average.size() == 3);
  CHECK(curve.average[0].estimate == doctest::Approx(2.0));
  CHECK(curve.average[1].estimate == doctest::Approx(8.0));
  CHECK(curve.average[2].estimate == doctest::Approx(18.0));
}

TEST_CASE("empty bins are omitted with a warning") {
  const auto ens = linear_field_1d(10, 1.0);
  const auto curve =
      experimental_variogram(ens, LagBins::at({2.0, 50.0}, 0.4), 2.0);
  CHECK(curve.average.size() == 1);
  CHECK(curve.warnings.size() == 1);
}

TEST_CASE("near-origin exponent") {
  ExperimentalCurve curve;
  for (double h : {0.5, 1.0, 1.5, 2.0}) {
    curve.average.push_back({h, h, 100});
  }
  CHECK(near_origin_exponent(curve, 4) == doctest::Approx(1.0).epsilon(1e-12));
  for (auto& b : curve.average) b.estimate = b.lag * b.lag;
  CHECK(near_origin_exponent(curve, 4) == doctest::Approx(2.0).epsilon(1e-12));
  curve.average[0].estimate = 0.0;
  CHECK_THROWS_AS(near_origin_exponent(curve, 4), input_error);
}

TEST_CASE("Gaussian order-alpha identities from simulated pairs") {
  // two standard Gaussian sites with covariance rho = 1 - gamma
  const double gamma = 0.8;
  SymmetricMatrix cov(2);
  cov.set(0, 0, 1.0);
  cov.set(1, 1, 1.0);
  cov.set(1, 0, 1.0 - gamma);
  const int n_real = 200000;
  const auto ens = simulate_gaussian(SpaceRef::euclidean(1),
                                     {Point::at({0.0}), Point::at({1.0})}, cov,
                                     n_real, {31, 0});
  const auto bins = LagBins::at({1.0}, 0.1);
  for (double alpha : {1.0, 2.0, 0.5}) {
    const auto curve = experimental_variogram(ens, bins, alpha);
    REQUIRE(curve.average.size() == 1);
    const double expect = gaussian_order_alpha(gamma, alpha);
    // empirical standard error of the per-realization estimates
    double s = 0, s2 = 0;
    for (const auto& rc : curve.per_realization) {
      s += rc[0].estimate;
      s2 += rc[0].estimate * rc[0].estimate;
    }
    const double mean = s / n_real;
    const double se = std::sqrt((s2 / n_real - mean * mean) / n_real);
    CHECK(std::abs(curve.average[0].estimate - expect) < 3 * se + 1e-9);
  }
}
