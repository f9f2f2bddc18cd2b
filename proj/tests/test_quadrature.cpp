#include <doctest.h>

#include <cmath>

#include "lifshitz/errors.hpp"
#include "lifshitz/quadrature.hpp"

using namespace lifshitz;

TEST_CASE("polynomials integrate exactly") {
  auto r = quad::integrate([](double x) { return 3 * x * x - 2 * x + 1; }, 0.0, 2.0);
  CHECK(r.value == doctest::Approx(8.0 - 4.0 + 2.0).epsilon(1e-14));
}

TEST_CASE("peaked integrand on a wide interval") {
  // Lorentzian of width 1e-4: adaptivity has to find it.
  const double g = 1e-4;
  auto f = [g](double x) { return g / ((x - 0.3) * (x - 0.3) + g * g); };
  const double exact = std::atan(0.7 / g) + std::atan(0.3 / g);
  auto r = quad::integrate(f, 0.0, 1.0, {1e-10, 1e-10});
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("sqrt endpoint behaviour over tiny panels") {
  auto f = [](double x) { return std::sqrt(x); };
  auto r = quad::integrate(f, 0.0, 1e-12, {1e-30, 1e-9});
  CHECK(r.value == doctest::Approx(2.0 / 3.0 * std::pow(1e-12, 1.5)).epsilon(1e-9));
}

TEST_CASE("panels add up") {
  auto f = [](double x) { return std::exp(-x); };
  const auto br = quad::log_panels(1e-3, 30.0, 4.0);
  auto r = quad::integrate_panels(f, br);
  CHECK(r.value == doctest::Approx(std::exp(-1e-3) - std::exp(-30.0)).epsilon(1e-10));
}

TEST_CASE("non-finite integrand raises QuadratureError") {
  CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / (x - 0.5) / 0.0; }, 0.0, 1.0), QuadratureError);
}

TEST_CASE("log grid endpoints and spacing") {
  const auto g = quad::log_grid(1e-2, 1e2, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1e-2);
  CHECK(g.back() == 1e2);
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(quad::log_grid(0.0, 1.0, 3), DomainError);
}
