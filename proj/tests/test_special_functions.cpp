#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dtpc/special_functions.hpp"

using namespace dtpc;

TEST_CASE("log_gamma matches libm lgamma across the positive axis") {
  for (double z : {0.05, 0.1, 0.35, 0.5, 0.7, 1.0, 1.5, 2.0, 3.7, 10.0, 25.5,
                   101.0, 500.0, 1234.5}) {
    const double reference = std::lgamma(z);
    REQUIRE(std::fabs(log_gamma(z) - reference) <=
            1e-12 * std::max(1.0, std::fabs(reference)));
  }
}

TEST_CASE("log_gamma at exact known points") {
  REQUIRE(log_gamma(1.0) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(log_gamma(2.0) == Catch::Approx(0.0).margin(1e-14));
  // Gamma(1/2) = sqrt(pi)
  REQUIRE(log_gamma(0.5) ==
          Catch::Approx(0.5 * std::log(kPi)).epsilon(1e-14));
  // Gamma(5) = 24
  REQUIRE(log_gamma(5.0) == Catch::Approx(std::log(24.0)).epsilon(1e-14));
}

TEST_CASE("log_factorial is log n!") {
  double log_nf = 0.0;
  for (std::int64_t n = 1; n <= 100; ++n) {
    log_nf += std::log(static_cast<double>(n));
    REQUIRE(std::fabs(log_factorial(n) - log_nf) <=
            1e-12 * std::max(1.0, log_nf));
  }
  REQUIRE(log_factorial(0) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE_THROWS_AS(log_factorial(-1), std::domain_error);
}

TEST_CASE("digamma reference values") {
  // psi(1) = -euler_gamma
  REQUIRE(digamma(1.0) ==
          Catch::Approx(-0.57721566490153286061).margin(1e-13));
  // psi(3/2) = 2 - euler_gamma - 2 log 2
  REQUIRE(digamma(1.5) ==
          Catch::Approx(0.036489973978576520560).margin(1e-13));
  // psi(1/2) = -euler_gamma - 2 log 2
  REQUIRE(digamma(0.5) ==
          Catch::Approx(-1.9635100260214234794).margin(1e-13));
}

TEST_CASE("digamma satisfies the recurrence psi(z+1) = psi(z) + 1/z") {
  for (double z : {0.5, 1.0, 2.5, 7.25, 42.0}) {
    REQUIRE(std::fabs(digamma(z + 1.0) - digamma(z) - 1.0 / z) <= 1e-12);
  }
}

TEST_CASE("special functions reject non-positive arguments") {
  REQUIRE_THROWS_AS(log_gamma(0.0), std::domain_error);
  REQUIRE_THROWS_AS(log_gamma(-1.5), std::domain_error);
  REQUIRE_THROWS_AS(digamma(0.0), std::domain_error);
  REQUIRE_THROWS_AS(digamma(-2.0), std::domain_error);
}
