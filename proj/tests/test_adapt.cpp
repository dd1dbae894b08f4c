#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "stvf/adapt.hpp"

using namespace stvf;

TEST_CASE("tolerance levels halve both tolerances") {
  const auto t0 = Tolerances::level(0);
  CHECK(t0.h == 2.0);
  CHECK(t0.tau == 0.25);
  const auto t3 = Tolerances::level(3);
  CHECK(t3.h == 0.25);
  CHECK(t3.tau == 0.25 / 8.0);
  CHECK_THROWS_AS(Tolerances::level(-1), std::invalid_argument);
}

TEST_CASE("equidistribution marking") {
  // 100 nodes, TOL_h = 1: refine above 0.09, coarsen below 0.01.
  const std::vector<double> eta{0.2, 0.089, 0.05, 0.011, 0.009, 0.0};
  const Marking m = mark(eta, 1.0, 100);
  CHECK(m.refine == std::vector<std::int32_t>{0});
  CHECK(m.coarsen == std::vector<std::int32_t>{4, 5});
  const Marking none = mark(std::vector<double>(4, 0.05), 1.0, 100);
  CHECK(none.refine.empty());
  CHECK(none.coarsen.empty());
  CHECK(mark({}, 1.0, 100).refine.empty());
}

TEST_CASE("marked sets are disjoint for any input") {
  std::vector<double> eta;
  for (int i = 0; i < 200; ++i) eta.push_back(std::pow(10.0, -4.0 + 0.02 * i));
  for (double tol : {0.01, 0.1, 1.0, 10.0}) {
    const Marking m = mark(eta, tol, 50);
    for (auto r : m.refine) {
      for (auto c : m.coarsen) CHECK(r != c);
    }
  }
}

TEST_CASE("time-step rule") {
  const TimeStepLimits lim{1e-8, 1e-2};
  SUBCASE("halve on a large indicator") {
    const auto d = adjust_timestep(0.3, 5, 0.25, 1e-3, lim);
    CHECK(d.tau == 5e-4);
    CHECK(d.halved);
    CHECK_FALSE(d.grew);
  }
  SUBCASE("halve on slow fixed-point convergence") {
    CHECK(adjust_timestep(0.0, kHalveIterations + 1, 0.25, 1e-3, lim).tau == 5e-4);
    CHECK(adjust_timestep(0.0, kHalveIterations, 0.25, 1e-3, lim).tau == 1e-3);
  }
  SUBCASE("grow when comfortably below the tolerance") {
    const auto d = adjust_timestep(0.05, 3, 0.25, 1e-3, lim);
    CHECK(d.tau == doctest::Approx(1.5e-3));
    CHECK(d.grew);
    CHECK(adjust_timestep(0.05, kGrowIterations, 0.25, 1e-3, lim).tau == 1e-3);
  }
  SUBCASE("keep in between") {
    const auto d = adjust_timestep(0.1, 3, 0.25, 1e-3, lim);
    CHECK(d.tau == 1e-3);
    CHECK_FALSE(d.halved);
    CHECK_FALSE(d.grew);
  }
  SUBCASE("clamped to the limits") {
    CHECK(adjust_timestep(0.0, 1, 0.25, 9e-3, lim).tau == 1e-2);
    CHECK(adjust_timestep(1.0, 1, 0.25, 1.5e-8, lim).tau == 1e-8);
  }
}
