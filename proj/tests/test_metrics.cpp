#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numbers>

#include "pedfair/metrics.hpp"

#include "support/stat_oracle.hpp"
#include "support/test_rng.hpp"

using Catch::Approx;
using namespace pedfair;

TEST_CASE("miss_rate on reference counts", "[metrics]") {
  CHECK(miss_rate({3, 1}) == Approx(0.25).margin(1e-15));
  CHECK(miss_rate({0, 5}) == 1.0);
  CHECK(miss_rate({7, 0}) == 0.0);
  CHECK_THROWS_AS(miss_rate({0, 0}), UndefinedRateError);
}

TEST_CASE("resolve_majority picks the larger support", "[metrics]") {
  SECTION("dominant non-aligned population") {
    const PairSpec spec =
        resolve_majority("legs", "aligned", {30000, 8900}, "non_aligned", {50000, 11100});
    CHECK(spec.dimension == "legs");
    CHECK(spec.minority == "aligned");
    CHECK(spec.majority == "non_aligned");
    CHECK_FALSE(spec.tie);
  }
  SECTION("argument order does not matter") {
    const PairSpec spec =
        resolve_majority("legs", "non_aligned", {50000, 11100}, "aligned", {30000, 8900});
    CHECK(spec.minority == "aligned");
    CHECK(spec.majority == "non_aligned");
  }
  SECTION("support ties break lexicographically, smaller label minority") {
    const PairSpec spec = resolve_majority("legs", "non_aligned", {60, 40}, "aligned", {50, 50});
    CHECK(spec.minority == "aligned");
    CHECK(spec.majority == "non_aligned");
    CHECK(spec.tie);
  }
  SECTION("empty subgroup is an error") {
    CHECK_THROWS_AS(resolve_majority("legs", "aligned", {0, 0}, "non_aligned", {1, 1}),
                    UndefinedRateError);
  }
}

TEST_CASE("eod on reference rates", "[metrics]") {
  // MR 0.10 vs 0.05.
  CHECK(eod({90, 10}, {190, 10}) == Approx(0.05).margin(1e-15));
  CHECK(eod({90, 10}, {90, 10}) == 0.0);
  CHECK(eod({190, 10}, {90, 10}) == Approx(-0.05).margin(1e-15));
}

TEST_CASE("cohens_h on reference rates", "[metrics]") {
  SECTION("MRs 0.10 vs 0.05") {
    CHECK(cohens_h({90, 10}, {190, 10}) == Approx(0.19247429699702195).margin(1e-9));
  }
  SECTION("equal rates") { CHECK(cohens_h({90, 10}, {90, 10}) == 0.0); }
  SECTION("extreme rates reach pi") {
    CHECK(cohens_h({0, 5}, {5, 0}) == Approx(std::numbers::pi).margin(1e-12));
  }
}

TEST_CASE("z_test on reference tables", "[metrics]") {
  SECTION("identical tables") {
    const ZTestResult r = z_test({80, 20}, {80, 20});
    CHECK(r.z == 0.0);
    CHECK(r.p == 1.0);
    CHECK_FALSE(r.degenerate);
    CHECK_FALSE(r.significant());
  }
  SECTION("20/100 vs 10/100 misses") {
    const ZTestResult r = z_test({80, 20}, {90, 10});
    CHECK(r.z == Approx(1.98030).margin(1e-4));
    CHECK(r.p == Approx(0.0477).margin(1e-3));
    CHECK_FALSE(r.degenerate);
    CHECK_FALSE(r.significant());  // 0.0477 is not below 0.01
  }
  SECTION("no misses anywhere degenerates") {
    const ZTestResult r = z_test({100, 0}, {100, 0});
    CHECK(r.z == 0.0);
    CHECK(r.p == 1.0);
    CHECK(r.degenerate);
  }
  SECTION("all misses everywhere degenerates") {
    const ZTestResult r = z_test({0, 100}, {0, 100});
    CHECK(r.z == 0.0);
    CHECK(r.p == 1.0);
    CHECK(r.degenerate);
  }
}

TEST_CASE("normal_cdf matches the high-precision oracle", "[metrics]") {
  CHECK(normal_cdf(0.0) == 0.5);
  for (double x = -6.0; x <= 6.0; x += 0.125) {
    CHECK(normal_cdf(x) ==
          Approx(static_cast<double>(testsupport::normal_cdf_oracle(x))).margin(1e-12));
  }
}

TEST_CASE("fairness cell assembles all statistics", "[metrics]") {
  const FairnessCell cell = make_fairness_cell({80, 20}, {90, 10}, /*tie=*/false);
  CHECK(cell.eod == Approx(0.10).margin(1e-15));
  CHECK(cell.abs_eod == cell.eod);
  CHECK(cell.h == Approx(0.2837941092083278).margin(1e-12));
  CHECK(cell.abs_h == cell.h);
  CHECK(cell.z == Approx(1.98030).margin(1e-4));
  CHECK(cell.n_minority == 100);
  CHECK(cell.n_majority == 100);
  CHECK_FALSE(cell.significant);
  CHECK_FALSE(cell.degenerate);
  CHECK_FALSE(cell.tie);

  const FairnessCell flipped = make_fairness_cell({90, 10}, {80, 20});
  CHECK(flipped.eod == -cell.eod);
  CHECK(flipped.abs_eod == cell.abs_eod);
  CHECK(flipped.h == -cell.h);
  CHECK(flipped.abs_h == cell.abs_h);
}

TEST_CASE("metric properties hold on random tables", "[metrics]") {
  testsupport::XorShift64Star rng(31);
  int checked = 0;
  while (checked < 300) {
    const std::int64_t n1 = rng.range(1, 2000);
    const std::int64_t n2 = rng.range(1, 2000);
    const std::int64_t fn1 = rng.range(0, n1);
    const std::int64_t fn2 = rng.range(0, n2);
    const SubgroupCounts a{n1 - fn1, fn1};
    const SubgroupCounts b{n2 - fn2, fn2};

    // Antisymmetry and range.
    REQUIRE(eod(a, b) == -eod(b, a));
    REQUIRE(cohens_h(a, b) == -cohens_h(b, a));
    REQUIRE(std::abs(cohens_h(a, b)) <= std::numbers::pi + 1e-12);

    // Sign agreement away from the endpoints.
    const double mr1 = miss_rate(a);
    const double mr2 = miss_rate(b);
    if (mr1 > 0 && mr1 < 1 && mr2 > 0 && mr2 < 1 && mr1 != mr2) {
      REQUIRE(std::signbit(eod(a, b)) == std::signbit(cohens_h(a, b)));
    }

    // Doubling the tables: rates and effect sizes fixed, |z| grows.
    const SubgroupCounts a2{2 * a.tp, 2 * a.fn};
    const SubgroupCounts b2{2 * b.tp, 2 * b.fn};
    REQUIRE(miss_rate(a2) == mr1);
    REQUIRE(eod(a2, b2) == eod(a, b));
    REQUIRE(cohens_h(a2, b2) == cohens_h(a, b));
    const ZTestResult z1 = z_test(a, b);
    const ZTestResult z2 = z_test(a2, b2);
    if (mr1 != mr2 && !z1.degenerate) {
      REQUIRE(std::abs(z2.z) > std::abs(z1.z));
    }

    // Oracle agreement whenever the pooled rate is non-degenerate.
    if (!z1.degenerate) {
      const testsupport::ZOracle zo = testsupport::z_oracle(fn1, n1, fn2, n2);
      REQUIRE(z1.z == Approx(static_cast<double>(zo.z)).margin(1e-9));
      REQUIRE(z1.p == Approx(static_cast<double>(zo.p)).margin(1e-9));
    }
    const double ho = static_cast<double>(testsupport::cohens_h_oracle(
        static_cast<long double>(mr1), static_cast<long double>(mr2)));
    REQUIRE(cohens_h(a, b) == Approx(ho).margin(1e-9));
    ++checked;
  }
}

TEST_CASE("region_average on reference joint tables", "[metrics]") {
  SECTION("lower body") {
    const std::map<Joint, double> eods = {
        {Joint::AnkleLeft, 22.7}, {Joint::AnkleRight, 22.4}, {Joint::KneeLeft, 23.0},
        {Joint::KneeRight, 22.7}, {Joint::HipLeft, 17.9},    {Joint::HipRight, 17.7}};
    CHECK(region_average(eods, BodyRegion::Lower) == Approx(21.0666666666667).margin(1e-9));
  }
  SECTION("upper body") {
    const std::map<Joint, double> eods = {
        {Joint::WristLeft, 11.4},    {Joint::WristRight, 11.2}, {Joint::ElbowLeft, 12.8},
        {Joint::ElbowRight, 13.0},   {Joint::ShoulderLeft, 12.6},
        {Joint::ShoulderRight, 12.5}};
    CHECK(region_average(eods, BodyRegion::Upper) == Approx(12.25).margin(1e-12));
  }
  SECTION("head") {
    const std::map<Joint, double> eods = {{Joint::EarLeft, 5.3},
                                          {Joint::EarRight, 6.0},
                                          {Joint::EyeLeft, 3.8},
                                          {Joint::EyeRight, 4.2},
                                          {Joint::Nose, 4.2}};
    CHECK(region_average(eods, BodyRegion::Head) == Approx(4.7).margin(1e-12));
  }
  SECTION("missing joint raises") {
    const std::map<Joint, double> sparse = {{Joint::AnkleLeft, 1.0}};
    CHECK_THROWS_AS(region_average(sparse, BodyRegion::Lower), IncompleteRegionError);
  }
  SECTION("region membership is disjoint and complete") {
    std::map<Joint, int> seen;
    for (BodyRegion r : {BodyRegion::Lower, BodyRegion::Upper, BodyRegion::Head}) {
      for (Joint j : region_joints(r)) ++seen[j];
    }
    CHECK(seen.size() == kJointCount);
    for (const auto& [joint, n] : seen) {
      (void)joint;
      CHECK(n == 1);
    }
    CHECK(region_joints(BodyRegion::Lower).size() == 6);
    CHECK(region_joints(BodyRegion::Upper).size() == 6);
    CHECK(region_joints(BodyRegion::Head).size() == 5);
  }
}
