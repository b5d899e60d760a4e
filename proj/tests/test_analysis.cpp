#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rldt/analysis.hpp"
#include "rldt/random.hpp"

using namespace rldt;

TEST_CASE("expected report return") {
  CHECK(expected_report_return(1.0, 5, -5) == 5.0);
  CHECK(expected_report_return(0.5, 5, -5) == doctest::Approx(0.0));
  CHECK(expected_report_return(0.7, 5, -5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(expected_report_return(1.5, 5, -5), std::invalid_argument);
  CHECK_THROWS_AS(expected_report_return(-0.1, 5, -5), std::invalid_argument);
}

TEST_CASE("query advantage values") {
  CHECK(query_advantage({0.4, 0.4}, 1.0, 0.0, 5, -5) == doctest::Approx(0.0));
  CHECK(query_advantage({0.5, 0.9}, 0.8, 0.0, 5, -5) == doctest::Approx(3.2));
  CHECK(query_advantage({1.0, 1.0}, 0.8, 0.0, 5, -5) == doctest::Approx(-1.0));
  CHECK(query_advantage({0.5, 0.9}, 0.8, 1.0, 5, -5) == doctest::Approx(2.2));
  CHECK_THROWS_AS(query_advantage({0.5, 2.0}, 0.8, 0.0, 5, -5), std::invalid_argument);
}

TEST_CASE("consistency check on the worked tuple") {
  CHECK(std::abs(advantage_consistency_check({0.5, 0.9}, 0.8, 0.0, 5, -5)) <= 1e-12);
}

TEST_CASE("consistency check on fuzzed tuples") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const DensityPair pair{uniform01(rng), uniform01(rng)};
    const double gamma = uniform01(rng);
    const double cost = 5 * uniform01(rng);
    const double rp = 10 * uniform01(rng);
    const double rm = -10 * uniform01(rng);
    CHECK_NOTHROW(advantage_consistency_check(pair, gamma, cost, rp, rm));
  }
}
