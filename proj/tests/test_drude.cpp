#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lifshitz/constants.hpp"
#include "lifshitz/drude.hpp"
#include "lifshitz/errors.hpp"

using namespace lifshitz;
using namespace lifshitz::drude;

namespace {

const DrudeParams kAu = fixtures::drude(9.0, 0.035);

// (2/pi) int_lo^hi x eps''(x)/(x^2 + z^2) dx by a fine trapezoid in log x.
double eq4_trapezoid(const DrudeParams& p, double lo, double hi, double z, std::size_t n = 200000) {
  const double dl = std::log(hi / lo) / static_cast<double>(n - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo * std::exp(dl * static_cast<double>(i));
    const double f = x * x * fixtures::drude_eps(p, x).im / (x * x + z * z);
    s += (i == 0 || i + 1 == n ? 0.5 : 1.0) * f;
  }
  return 2.0 / M_PI * s * dl;
}

}  // namespace

TEST_CASE("real axis: high-frequency limit") {
  const auto e = eps_real_axis(kAu, 1e6);
  CHECK(e.re == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.im < 1e-15);
}

TEST_CASE("real axis at 0.125 eV") {
  const auto e = eps_real_axis(kAu, 0.125);
  // High-precision reference values.
  CHECK(e.im == doctest::Approx(1345.994065281899).epsilon(1e-13));
  CHECK(e.re == doctest::Approx(-4806.121661721068).epsilon(1e-13));
  CHECK(e.im == doctest::Approx(1.346e3).epsilon(1e-3));
}

TEST_CASE("eps'' decreases above omega_tau / sqrt 2") {
  double prev = std::numeric_limits<double>::infinity();
  for (double w : fixtures::log_points(kAu.omega_tau / std::sqrt(2.0) * 1.001, 100.0, 400)) {
    const double v = eps_real_axis(kAu, w).im;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("polarization constant shifts eps' only") {
  const auto a = eps_real_axis(fixtures::drude(8.41, 0.02, 1.0), 0.5);
  const auto b = eps_real_axis(fixtures::drude(8.41, 0.02, 7.15), 0.5);
  CHECK(b.re - a.re == doctest::Approx(6.15));
  CHECK(b.im == a.im);
}

TEST_CASE("imaginary axis closed form") {
  CHECK(eps_imag_axis_closed(kAu, 1e9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eps_imag_axis_closed(kAu, 0.988) == doctest::Approx(81.14057250050459).epsilon(1e-13));
  CHECK(eps_imag_axis_closed(kAu, 0.988) == doctest::Approx(81.1).epsilon(1e-3));
  double prev = std::numeric_limits<double>::infinity();
  for (double z : fixtures::log_points(1e-4, 1e3, 300)) {
    const double v = eps_imag_axis_closed(kAu, z);
    CHECK(v > 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("closed form agrees with the dispersion integral of the Drude eps''") {
  for (double z : fixtures::log_points(0.01, 10.0, 12)) {
    const double num = 1.0 + eq4_trapezoid(kAu, 1e-9, 1e7, z);
    CHECK(std::abs(num / eps_imag_axis_closed(kAu, z) - 1.0) < 1e-4);
  }
}

TEST_CASE("low-frequency contribution at the characteristic frequency of 100 nm") {
  const double e1 = eps1_low_contribution(kAu, 0.125, 0.988);
  CHECK(e1 == doctest::Approx(68.40782054499664).epsilon(1e-12));
}

TEST_CASE("low-frequency contribution limits") {
  const double z = 0.988;
  CHECK(eps1_low_contribution(kAu, 1e12, z) ==
        doctest::Approx(eps_imag_axis_closed(kAu, z) - 1.0).epsilon(1e-9));
  // Small omega_c: (2/pi) wp^2 wc / (wt zeta^2), vanishing linearly.
  const double wc = 1e-12;
  const double lin = 2.0 / M_PI * kAu.omega_p * kAu.omega_p * wc / (kAu.omega_tau * z * z);
  CHECK(eps1_low_contribution(kAu, wc, z) == doctest::Approx(lin).epsilon(1e-6));
  CHECK(eps1_low_contribution(kAu, 1e-300, z) < 1e-280);
}

TEST_CASE("low part plus numeric tail gives the full closed form") {
  for (double z : {0.02, 0.3, 0.988, 4.0}) {
    const double tail = eq4_trapezoid(kAu, 0.125, 1e8, z, 400000);
    const double total = eps1_low_contribution(kAu, 0.125, z) + tail;
    CHECK(std::abs(total / (eps_imag_axis_closed(kAu, z) - 1.0) - 1.0) < 1e-6);
  }
}

TEST_CASE("removable singularity at zeta = omega_tau") {
  const double wt = kAu.omega_tau;
  const double at = eps1_low_contribution(kAu, 0.125, wt);
  CHECK(std::isfinite(at));
  // Within a relative step d the value moves by at most a few d.
  for (double d : {1e-12, 1e-9, 1e-7, 2e-6, 1e-5}) {
    CHECK(std::abs(eps1_low_contribution(kAu, 0.125, wt * (1 + d)) / at - 1.0) < 3.0 * d + 1e-12);
    CHECK(std::abs(eps1_low_contribution(kAu, 0.125, wt * (1 - d)) / at - 1.0) < 3.0 * d + 1e-12);
  }
  // Points straddling 1e-6 relative distance agree.
  for (double s : {1.0, -1.0}) {
    const double a = eps1_low_contribution(kAu, 0.125, wt * (1 + s * 0.99e-6));
    const double b = eps1_low_contribution(kAu, 0.125, wt * (1 + s * 1.01e-6));
    CHECK(std::abs(a / b - 1.0) < 1e-7);
  }
}

TEST_CASE("omega^3 eps'' tends to omega_p^2 omega_tau") {
  const double w = 100.0 * kAu.omega_tau;
  const double v = std::pow(w, 3) * eps_real_axis(kAu, w).im;
  CHECK(std::abs(v / (kAu.omega_p * kAu.omega_p * kAu.omega_tau) - 1.0) < 1e-3);
}

TEST_CASE("plasma frequency of bulk gold") {
  const auto gas = electron_gas_from_bulk(19.3, 196.97);
  CHECK(gas.n_density == doctest::Approx(5.90076238e28).epsilon(1e-8));
  const double wp = plasma_from_density(gas);
  CHECK(wp == doctest::Approx(9.021688346630257).epsilon(1e-10));
  CHECK(std::abs(wp - 9.0) <= 0.1);

  const auto heavy = electron_gas_from_bulk(19.3, 196.97, 1.0, 2.0);
  CHECK(plasma_from_density(heavy) == doctest::Approx(wp / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(plasma_from_density({1e-30, 1.0}) < 1e-20);
}

TEST_CASE("domain checks") {
  CHECK_THROWS_AS(eps_real_axis(kAu, 0.0), DomainError);
  CHECK_THROWS_AS(eps_imag_axis_closed(kAu, -1.0), DomainError);
  CHECK_THROWS_AS(make_params(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(make_params(-1.0, 0.1), DomainError);
  CHECK(make_params(9.0, 0.035).pol == 1.0);
}
