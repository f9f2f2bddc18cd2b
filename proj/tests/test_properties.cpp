// Randomized properties with fixed seeds.

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "lifshitz/casimir.hpp"
#include "lifshitz/drude.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/spectra.hpp"

using namespace lifshitz;
using namespace lifshitz::spectra;

namespace {

SpectralTable random_table(fixtures::Gen& g, double lo, double hi, std::size_t n) {
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(g.log_uniform(lo, hi));
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  std::vector<SpectralPoint> pts;
  for (double x : w) {
    SpectralPoint p{x, g.uniform(-1e4, 1e4) * std::pow(10.0, g.uniform(-8.0, 8.0)),
                    g.log_uniform(1e-12, 1e6)};
    if (g.index(5) == 0) p.eps_re.reset();
    pts.push_back(p);
  }
  return SpectralTable(std::move(pts), {"random", "", "", {}});
}

}  // namespace

TEST_CASE("save then load keeps 15 significant digits") {
  fixtures::Gen g(101);
  for (int trial = 0; trial < 25; ++trial) {
    const auto t = random_table(g, 1e-3, 1e4, 4 + g.index(60));
    std::stringstream ss;
    write_table(ss, t);
    const auto back = parse_table(ss, TableFormat::eps);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& a = t.points()[i];
      const auto& b = back.points()[i];
      CHECK(std::abs(b.omega / a.omega - 1.0) < 1e-14);
      REQUIRE(a.eps_re.has_value() == b.eps_re.has_value());
      if (a.eps_re) CHECK(std::abs(*b.eps_re - *a.eps_re) <= 1e-14 * std::abs(*a.eps_re));
      CHECK(std::abs(*b.eps_im - *a.eps_im) <= 1e-14 * *a.eps_im);
    }
    CHECK(back.meta().source == "random");
  }
}

TEST_CASE("n, k survive the round trip through eps") {
  fixtures::Gen g(202);
  for (int i = 0; i < 2000; ++i) {
    const double n = g.log_uniform(1e-3, 1e3);
    const double k = g.log_uniform(1e-3, 1e3);
    const auto e = eps_from_nk(n, k);
    const auto nk = nk_from_eps(e.re, e.im);
    CHECK(std::abs(nk[0] / n - 1.0) < 1e-12);
    CHECK(std::abs(nk[1] / k - 1.0) < 1e-12);
  }
}

TEST_CASE("merged tables are valid and take the low side at the joint") {
  fixtures::Gen g(303);
  int merged = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto low = random_table(g, 0.01, g.log_uniform(0.5, 5.0), 4 + g.index(30));
    const auto high = random_table(g, g.log_uniform(0.05, 3.0), 50.0, 4 + g.index(30));
    const double joint = g.log_uniform(0.05, 5.0);
    try {
      const auto m = merge_tables(low, high, joint);
      ++merged;
      for (std::size_t i = 1; i < m.size(); ++i) CHECK(m.points()[i].omega > m.points()[i - 1].omega);
      for (const auto& p : m.points()) {
        if (p.omega <= joint) CHECK(p.omega <= low.omega_max());
        else CHECK(p.omega >= high.omega_min());
      }
    } catch (const MergeError&) {
    } catch (const ValidationError&) {
      // fewer than four points survive the cut
    }
  }
  CHECK(merged > 100);
}

TEST_CASE("smoothing noisy data beats interpolating the noise") {
  fixtures::Gen g(404);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = g.drude();
    const double lo = g.log_uniform(0.05, 0.2);
    const auto w = fixtures::log_points(lo, lo * 20.0, 60);
    std::vector<double> truth, noisy;
    std::vector<SpectralPoint> pts;
    for (double x : w) {
      const double e = fixtures::drude_eps(p, x).im;
      truth.push_back(e);
      noisy.push_back(e * (1.0 + 0.01 * g.normal()));
      pts.push_back({x, std::nullopt, noisy.back()});
    }
    const auto curve = smooth_segments(SpectralTable(pts), Field::eps_im);
    const fixtures::NaturalSpline spline(w, noisy);
    double ss_curve = 0.0, ss_spline = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const double m = std::sqrt(w[i] * w[i + 1]);
      const double exact = fixtures::drude_eps(p, m).im;
      ss_curve += std::pow(curve(m) / exact - 1.0, 2);
      ss_spline += std::pow(spline(m) / exact - 1.0, 2);
    }
    CHECK(ss_curve <= ss_spline);
  }
}

TEST_CASE("quartics of random coefficients are reproduced") {
  fixtures::Gen g(505);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 5> c{};
    for (double& x : c) x = g.uniform(-1.0, 1.0);
    c[0] = 20.0;
    auto q = [&](double w) { return c[0] + w * (c[1] + w * (c[2] + w * (c[3] + w * c[4]))); };
    std::vector<SpectralPoint> pts;
    for (double w : fixtures::log_points(0.5, 2.5, 12 + g.index(40))) pts.push_back({w, q(w), std::nullopt});
    SmoothingOptions opt;
    opt.first_basis = Basis::powers;
    const auto curve = smooth_segments(SpectralTable(pts), Field::eps_re, opt);
    for (const auto& p : pts) CHECK(std::abs(curve(p.omega) / *p.eps_re - 1.0) < 1e-10);
  }
}

TEST_CASE("random Drude mirrors stay between vacuum and ideal") {
  fixtures::Gen g(606);
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = g.drude();
    const double L = g.log_uniform(0.05e-6, 5e-6);
    const auto r = casimir::reduction_factor(casimir::MirrorSpec::drude(p), L);
    CHECK(r.eta > 0.0);
    CHECK(r.eta < 1.0);
    CHECK(std::abs(r.force / casimir::force_ideal(L) - r.eta) <= 1e-12);
  }
}

TEST_CASE("closed-form eps on the imaginary axis exceeds one and decreases") {
  fixtures::Gen g(707);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = g.drude();
    const double z1 = g.log_uniform(1e-5, 1e4);
    const double z2 = z1 * g.log_uniform(1.0001, 100.0);
    const double e1 = drude::eps_imag_axis_closed(p, z1);
    CHECK(e1 > 1.0);
    CHECK(drude::eps_imag_axis_closed(p, z2) < e1);
  }
}
