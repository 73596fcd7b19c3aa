#include <doctest.h>

#include <cmath>

#include "indivar/rng.hpp"
#include "indivar/validity.hpp"
#include "oracle_helpers.hpp"

using namespace indivar;

namespace {

SymmetricMatrix mat3(double g12, double g13, double g23) {
  SymmetricMatrix m(3);
  m.set(1, 0, g12);
  m.set(2, 0, g13);
  m.set(2, 1, g23);
  return m;
}

SymmetricMatrix all_half(int n) {
  SymmetricMatrix m(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < k; ++l) m.set(k, l, 0.5);
  return m;
}

double gauss_variogram(double h) { return 1.0 - std::exp(-h * h); }

Configuration gauss_triple(double scale = 1.0) {
  return Configuration::from_matrix(mat3(scale * gauss_variogram(0.1),
                                         scale * gauss_variogram(0.2),
                                         scale * gauss_variogram(0.1)));
}

}  // namespace

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(Configuration::from_matrix(SymmetricMatrix(1)), input_error);
  SymmetricMatrix bad_diag(2);
  bad_diag.set(0, 0, 0.1);
  CHECK_THROWS_AS(Configuration::from_matrix(bad_diag), input_error);
  SymmetricMatrix negative(2);
  negative.set(1, 0, -0.1);
  CHECK_THROWS_AS(Configuration::from_matrix(negative), input_error);
}

TEST_CASE("gamma_matrix") {
  const auto space = SpaceRef::euclidean(1);
  const auto m = make_exponential(space, 1.0, 1.0);
  auto cfg = gamma_matrix(*m, {Point::at({0}), Point::at({1}), Point::at({2})});
  const double e1 = (1 - std::exp(-1.0)) / 4;  // 0.1580...
  const double e2 = (1 - std::exp(-2.0)) / 4;  // 0.2162...
  CHECK(cfg.g(0, 1) == doctest::Approx(e1).epsilon(1e-14));
  CHECK(cfg.g(0, 2) == doctest::Approx(e2).epsilon(1e-14));
  CHECK(cfg.g(1, 2) == doctest::Approx(e1).epsilon(1e-14));

  // identical points give the zero matrix
  auto cfg2 = gamma_matrix(*m, {Point::at({3}), Point::at({3})});
  CHECK(cfg2.g(0, 1) == 0.0);

  const auto nug = make_nugget(space, 1.0, NuggetCovariance::constant_value(0.5));
  auto cfg3 = gamma_matrix(*nug, {Point::at({0}), Point::at({1}), Point::at({5})});
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < k; ++l) CHECK(cfg3.g(k, l) == doctest::Approx(0.125));
}

TEST_CASE("negative type") {
  SUBCASE("two points always pass") {
    SymmetricMatrix m(2);
    m.set(1, 0, 0.3);
    CHECK(check_negative_type(Configuration::from_matrix(m)).verdict ==
          Verdict::pass);
  }
  SUBCASE("Gaussian variogram triple passes; closed-form eigen oracle agrees") {
    const auto cfg = gauss_triple();
    CHECK(check_negative_type(cfg).verdict == Verdict::pass);
    // oracle: the doubly centered -JgJ assembled by hand, eigenvalues by the
    // trigonometric 3x3 formula
    SymmetricMatrix M(3);
    const int n = 3;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l <= k; ++l) {
        double v = 0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double jka = (k == a ? 1.0 : 0.0) - 1.0 / n;
            const double jlb = (l == b ? 1.0 : 0.0) - 1.0 / n;
            v -= jka * cfg.g(a, b) * jlb;
          }
        M.set(k, l, v);
      }
    const auto eig = oracle::eig3x3_sym(M);
    CHECK(eig[0] >= -1e-12);
  }
  SUBCASE("hand-built violation yields a reusable certificate") {
    const auto cfg = Configuration::from_matrix(mat3(1.0, 0.01, 0.01));
    const auto r = check_negative_type(cfg);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(0.32).epsilon(1e-9));
    const double re = reevaluate_certificate(cfg, r);
    CHECK(re == doctest::Approx(r.margin).epsilon(1e-12));
    // certificate weights sum to zero
    double s = 0;
    for (double v : r.certificate.real_lambdas) s += v;
    CHECK(std::abs(s) < 1e-12);
  }
}

TEST_CASE("pointwise bound") {
  SUBCASE("boundary value passes") {
    SymmetricMatrix m(2);
    m.set(1, 0, 0.5);  // median transform of rho = -1
    CHECK(check_pointwise(Configuration::from_matrix(m)).verdict == Verdict::pass);
  }
  SUBCASE("slight excess fails with an entry certificate") {
    SymmetricMatrix m(2);
    m.set(1, 0, 0.5 + 1e-6);
    const auto cfg = Configuration::from_matrix(m);
    const auto r = check_pointwise(cfg);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.certificate.kind == Certificate::Kind::entry);
    CHECK(reevaluate_certificate(cfg, r) == doctest::Approx(1e-6).epsilon(1e-6));
  }
  SUBCASE("zero matrix passes") {
    CHECK(check_pointwise(Configuration::from_matrix(SymmetricMatrix(3))).verdict ==
          Verdict::pass);
  }
}

TEST_CASE("polygonal / triangle") {
  SUBCASE("Gaussian variogram violates the triangle inequality") {
    const auto cfg = gauss_triple();
    const auto r = check_polygonal(cfg);
    CHECK(r.verdict == Verdict::fail);
    // gamma(0.2) - 2 gamma(0.1)
    CHECK(r.margin ==
          doctest::Approx(gauss_variogram(0.2) - 2 * gauss_variogram(0.1))
              .epsilon(1e-9));
    CHECK(reevaluate_certificate(cfg, r) ==
          doctest::Approx(r.margin).epsilon(1e-12));
  }
  SUBCASE("exponential model on collinear points passes") {
    const auto m = make_exponential(SpaceRef::euclidean(1), 1.0, 1.0);
    std::vector<Point> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(Point::at({0.4 * i}));
    CHECK(check_polygonal(gamma_matrix(*m, pts)).verdict == Verdict::pass);
  }
  SUBCASE("equal off-diagonals pass") {
    SymmetricMatrix m(3);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < k; ++l) m.set(k, l, 0.2);
    CHECK(check_polygonal(Configuration::from_matrix(m)).verdict == Verdict::pass);
  }
  SUBCASE("two points are skipped") {
    SymmetricMatrix m(2);
    m.set(1, 0, 0.1);
    CHECK(check_polygonal(Configuration::from_matrix(m)).verdict ==
          Verdict::skipped);
  }
  SUBCASE("sampled fallback at n > 12 finds planted violations") {
    const int n = 14;
    SymmetricMatrix m(n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) m.set(k, l, 0.3);
    m.set(1, 0, 0.0);
    m.set(2, 0, 0.0);
    m.set(2, 1, 0.45);  // triangle 0-1-2 broken: 0.45 > 0 + 0
    const auto cfg = Configuration::from_matrix(m);
    const auto r = check_polygonal(cfg);
    CHECK(r.verdict == Verdict::fail);
    CHECK(reevaluate_certificate(cfg, r) ==
          doctest::Approx(r.margin).epsilon(1e-12));
  }
}

TEST_CASE("integer weight families on the all-half matrix") {
  const auto cfg = Configuration::from_matrix(all_half(3));
  SUBCASE("matheron passes") {
    CHECK(check_integer_weights(cfg, WeightFamily::matheron).verdict ==
          Verdict::pass);
  }
  SUBCASE("odd-clique fails at lambda = (1,1,1): LHS 3 exceeds the bound 2") {
    const auto r = check_integer_weights(cfg, WeightFamily::odd_clique);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.certificate.lambdas == std::vector<long long>{1, 1, 1});
    CHECK(reevaluate_certificate(cfg, r) == doctest::Approx(1.0));
  }
  SUBCASE("shepp fails too: RHS is 2") {
    const auto r = check_integer_weights(cfg, WeightFamily::shepp);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("gap fails; worst violation grows with the weights") {
    const auto r = check_gap(cfg);
    CHECK(r.verdict == Verdict::fail);
    // at lambda = (1,1,1): LHS 3 > 2; scaling to (3,3,3) makes the worst
    // margin 27 - 18 = 9
    CHECK(r.margin == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(r.certificate.lambdas == std::vector<long long>{3, 3, 3});
    CHECK(reevaluate_certificate(cfg, r) == doctest::Approx(9.0));
  }
}

TEST_CASE("psd family: two-point bound") {
  // LHS = 2 g12 <= 1 = sigma^2/4 for any g <= 1/2
  SymmetricMatrix m(2);
  m.set(1, 0, 0.5);
  const auto r =
      check_integer_weights(Configuration::from_matrix(m), WeightFamily::psd);
  CHECK(r.verdict == Verdict::pass);
}

TEST_CASE("shepp passes when entries stay below one third") {
  SymmetricMatrix m(3);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < k; ++l) m.set(k, l, 1.0 / 3);
  CHECK(check_integer_weights(Configuration::from_matrix(m), WeightFamily::shepp)
            .verdict == Verdict::pass);
}

TEST_CASE("weight vector gap") {
  CHECK(WeightVector{{1, -1}}.gap() == 0);
  CHECK(WeightVector{{2, 1, 1}}.gap() == 0);
  CHECK(WeightVector{{1, 1, 1}}.gap() == 1);
  CHECK_THROWS_AS(WeightVector{std::vector<long long>(25, 1)}.gap(), input_error);

  // brute-force oracle on random small vectors + parity invariant
  CounterRng rng(5, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(6));
    std::vector<long long> lam(n);
    for (auto& v : lam) v = static_cast<long long>(rng.next_below(9)) - 4;
    WeightVector w{lam};
    const long long g = w.gap();
    CHECK(g == oracle::gap_brute(lam));
    CHECK(((g - w.sigma()) % 2) == 0);
  }
}

TEST_CASE("exact realizability") {
  SUBCASE("zero matrix: point mass on the constant field") {
    const auto res = realizability_small(
        Configuration::from_matrix(SymmetricMatrix(3)));
    CHECK(res.feasible);
    CHECK(res.moment_error < 1e-12);
    REQUIRE(res.distribution.size() == 1);
    CHECK(res.distribution[0].weight == doctest::Approx(1.0));
    CHECK(res.distribution[0].signs == std::vector<int>{1, 1, 1});
  }
  SUBCASE("three mutually antithetic points are impossible") {
    const auto res = realizability_small(Configuration::from_matrix(all_half(3)));
    CHECK_FALSE(res.feasible);
    CHECK(res.certificate_violation > 1e-9);
    CHECK(res.corner_min >= -1e-7);
  }
  SUBCASE("quarter-scaled Gaussian triple is infeasible") {
    const auto res = realizability_small(gauss_triple(0.25));
    CHECK_FALSE(res.feasible);
    CHECK(res.certificate_violation > 0);
  }
  SUBCASE("exponential model on {0,1,2} is feasible") {
    const auto m = make_exponential(SpaceRef::euclidean(1), 1.0, 1.0);
    const auto cfg =
        gamma_matrix(*m, {Point::at({0}), Point::at({1}), Point::at({2})});
    const auto res = realizability_small(cfg);
    CHECK(res.feasible);
    CHECK(res.moment_error < 1e-9);
  }
  SUBCASE("n cap") {
    CHECK_THROWS_AS(realizability_small(Configuration::from_matrix(
                        SymmetricMatrix(11))),
                    input_error);
  }
  SUBCASE("matches the closed-form three-point criterion on random matrices") {
    CounterRng rng(21, 0);
    int feasible_seen = 0, infeasible_seen = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const double g12 = 0.5 * rng.next_double();
      const double g13 = 0.5 * rng.next_double();
      const double g23 = 0.5 * rng.next_double();
      // corner-probability margin; skip knife-edge draws near the boundary
      double corner_margin = 1.0;
      const double c12 = 1 - 4 * g12, c13 = 1 - 4 * g13, c23 = 1 - 4 * g23;
      for (int s2 : {+1, -1})
        for (int s3 : {+1, -1})
          corner_margin = std::min(
              corner_margin, (1 + s2 * c12 + s3 * c13 + s2 * s3 * c23) / 4.0);
      if (std::abs(corner_margin) < 1e-8) continue;
      const bool expected = corner_margin >= 0;
      const auto res = realizability_small(
          Configuration::from_matrix(mat3(g12, g13, g23)), 1e-9);
      CHECK(res.feasible == expected);
      (expected ? feasible_seen : infeasible_seen)++;
    }
    CHECK(feasible_seen > 50);
    CHECK(infeasible_seen > 50);
  }
}

TEST_CASE("hierarchy consistency on valid models") {
  // realizable => every family passes at its bound
  const auto space = SpaceRef::euclidean(2);
  const auto model = make_exponential(space, 0.8, 1.0);
  const auto median = make_median_indicator(GaussianCorrelation(
      GaussianCorrelation::Family::gaussian, 2.0, std::nullopt, space));
  CounterRng rng(31, 0);
  CheckOptions opt;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(5));
    const auto pts = random_points(space, n, 4.0, rng);
    for (const auto* m : {model.get(), median.get()}) {
      const auto cfg = gamma_matrix(*m, pts);
      const auto res = realizability_small(cfg);
      CHECK(res.feasible);
      for (const auto& r : run_checks(cfg, CheckProfile::indicator, opt)) {
        INFO(r.name);
        CHECK(r.verdict != Verdict::fail);
      }
    }
  }
}

TEST_CASE("any family failure implies non-realizability") {
  CounterRng rng(41, 0);
  int failures_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(3));  // 3..5
    SymmetricMatrix m(n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) m.set(k, l, 0.5 * rng.next_double());
    const auto cfg = Configuration::from_matrix(m);
    bool any_fail = false;
    for (const auto& r : run_checks(cfg)) {
      if (r.verdict == Verdict::fail) {
        any_fail = true;
        // certificates reproduce their margins
        CHECK(reevaluate_certificate(cfg, r) ==
              doctest::Approx(r.margin).epsilon(1e-12));
      }
    }
    if (any_fail) {
      ++failures_seen;
      CHECK_FALSE(realizability_small(cfg).feasible);
    }
  }
  CHECK(failures_seen > 20);
}

TEST_CASE("rounded psd dominates the weaker families") {
  CounterRng rng(51, 0);
  CheckOptions opt;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(3));
    SymmetricMatrix m(n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) m.set(k, l, 0.5 * rng.next_double());
    const auto cfg = Configuration::from_matrix(m);
    if (check_integer_weights(cfg, WeightFamily::rounded_psd, opt).verdict !=
        Verdict::pass)
      continue;
    CHECK(check_polygonal(cfg, opt).verdict == Verdict::pass);
    CHECK(check_integer_weights(cfg, WeightFamily::odd_clique, opt).verdict ==
          Verdict::pass);
    CHECK(check_integer_weights(cfg, WeightFamily::hypermetric, opt).verdict ==
          Verdict::pass);
    CHECK(check_integer_weights(cfg, WeightFamily::psd, opt).verdict ==
          Verdict::pass);
  }
}

TEST_CASE("madogram profile accepts the Gaussian madogram transform") {
  // sqrt(gamma/pi) exceeds 1/2 at large lags, so the pointwise bound breaks,
  // but the madogram profile must pass
  std::vector<double> lags = {0.0, 2.0, 4.0, 6.0};
  const int n = static_cast<int>(lags.size());
  SymmetricMatrix mad(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < k; ++l)
      mad.set(k, l, std::sqrt(gauss_variogram(std::abs(lags[k] - lags[l])) / M_PI));
  const auto cfg = Configuration::from_matrix(mad);
  bool pointwise_fails = check_pointwise(cfg).verdict == Verdict::fail;
  CHECK(pointwise_fails);
  for (const auto& r : run_checks(cfg, CheckProfile::madogram)) {
    INFO(r.name);
    CHECK(r.verdict != Verdict::fail);
  }
}

TEST_CASE("square-rooted resistance distance is Euclidean-embeddable") {
  CounterRng rng(61, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng.next_below(4));
    std::vector<Graph::Edge> edges;
    for (int k = 1; k < n; ++k)
      edges.push_back({static_cast<int>(rng.next_below(k)), k,
                       0.3 + rng.next_double()});
    const Graph g = Graph::from_edges(n, edges);
    const auto res = resistance_distance_matrix(g);
    // (sqrt d_R)^2 = d_R must be conditionally negative semidefinite
    SymmetricMatrix m(n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) m.set(k, l, res(k, l));
    CHECK(check_negative_type(Configuration::from_matrix(m)).verdict ==
          Verdict::pass);
  }
}

TEST_CASE("worker count does not change results") {
  const auto cfg = gauss_triple(0.4);
  CheckOptions serial, parallel;
  parallel.workers = 3;
  const auto a = run_checks(cfg, CheckProfile::indicator, serial);
  const auto b = run_checks(cfg, CheckProfile::indicator, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].verdict == b[i].verdict);
    CHECK(a[i].margin == b[i].margin);
    CHECK(a[i].certificate.lambdas == b[i].certificate.lambdas);
  }
}

TEST_CASE("report serialization") {
  const auto cfg = Configuration::from_matrix(all_half(3));
  const auto results = run_checks(cfg);
  const std::string json = check_report_json(results);
  CHECK(json.find("\"check\"") != std::string::npos);
  CHECK(json.find("odd_clique") != std::string::npos);
  CHECK(json.find("\"fail\"") != std::string::npos);
  const std::string table = check_report_table(results);
  CHECK(table.find("odd_clique") != std::string::npos);
}
