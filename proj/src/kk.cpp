#include "lifshitz/kk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"
#include "nelder_mead.hpp"

namespace lifshitz::kk {

namespace {

using constants::kPi;

constexpr double kTwoOverPi = 2.0 / kPi;
constexpr double kJumpWarn = 0.05;
constexpr double kPanelsPerDecade = 6.0;

// (1/(2w)) ln|(a - w)/(a + w)|: the PV of int_0^a dx/(x^2 - w^2). Zero at a = 0 and a = inf.
double ell(double a, double w) {
  if (a == 0.0 || std::isinf(a)) return 0.0;
  return std::log(std::abs((a - w) / (a + w))) / (2.0 * w);
}

// int_a^inf dx / (x^2 (x^2 + z^2)) = (t - atan t) / (t^3 a^3), t = z/a.
double cubic_tail_imag(double a, double z) {
  if (std::isinf(a)) return 0.0;
  const double t = z / a;
  const double a3 = a * a * a;
  if (t < 0.1) {
    const double t2 = t * t;
    double sum = 0.0;
    double term = 1.0;
    for (int n = 0; n < 9; ++n) {
      sum += (n % 2 ? -term : term) / (2.0 * n + 3.0);
      term *= t2;
    }
    return sum / a3;
  }
  return (t - std::atan(t)) / (t * t * t * a3);
}

// Breakpoints for numeric work on [lo, hi] inside the smoothed range: curve
// joins, log panels and any extra split points.
std::vector<double> mid_breaks(const DielectricModel& m, double lo, double hi,
                               std::initializer_list<double> extra = {}) {
  std::vector<double> b = quad::log_panels(lo, hi, kPanelsPerDecade);
  for (double x : m.mid().breakpoints()) {
    if (x > lo && x < hi) b.push_back(x);
  }
  for (double x : extra) {
    if (x > lo && x < hi) b.push_back(x);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(), [](double u, double v) { return std::abs(u - v) <= 1e-14 * v; }),
          b.end());
  b.front() = lo;
  b.back() = hi;
  return b;
}

double mid_eps_im(const DielectricModel& m, double x) { return std::max(0.0, m.mid().evaluate(x)); }

// d/dx [x eps''(x)] on the smoothed range.
double mid_g_prime(const DielectricModel& m, double x) {
  const double v = m.mid().evaluate(x);
  if (v <= 0.0) return 0.0;
  return v + x * m.mid().derivative(x);
}

// Everything in the real-axis PV sum that does not depend on the low Drude part.
// The sum is assembled as
//   head_regular + mid + tail_regular + coef_c ell(omega_c) + coef_max ell(omega_max)
// with coef_c = g_head(w) - c_m and coef_max = c_m + tail_log_coef.
struct PvPieces {
  double omega = 0.0;
  double c_m = 0.0;
  double mid = 0.0;
  double ell_c = 0.0;
  double ell_max = 0.0;
  double tail_regular = 0.0;
  double tail_log_coef = 0.0;
};

PvPieces pv_pieces(const DielectricModel& m, double w, const KkOptions& opt) {
  const double wc = m.omega_c();
  const double wm = m.omega_max();
  const double C = m.scheme().high_coeff;

  PvPieces p;
  p.omega = w;
  const double anchor = std::clamp(w, wc, wm);
  p.c_m = anchor * mid_eps_im(m, anchor);

  if (wm > wc) {
    const double cm = p.c_m;
    auto f = [&](double x) {
      const double d = x * x - w * w;
      if (std::abs(x - w) <= 1e-10 * w) return mid_g_prime(m, x) / (2.0 * x);
      return (x * mid_eps_im(m, x) - cm) / d;
    };
    const auto breaks = mid_breaks(m, wc, wm, {w});
    p.mid = quad::integrate_panels(f, breaks, opt.tol).value;
  }
  p.ell_c = ell(wc, w);
  p.ell_max = ell(wm, w);

  if (C > 0.0) {
    const double t = w / wm;
    if (t < 0.1) {
      // C int_a^inf dx/(x^2 (x^2 - w^2)) = (C/a^3) sum t^(2n)/(2n+3).
      const double t2 = t * t;
      double sum = 0.0;
      double term = 1.0;
      for (int n = 0; n < 9; ++n) {
        sum += term / (2.0 * n + 3.0);
        term *= t2;
      }
      p.tail_regular = C * sum / (wm * wm * wm);
    } else {
      p.tail_regular = -C / (w * w * wm);
      p.tail_log_coef = -C / (w * w);
    }
  }
  return p;
}

double log_term(double coef, double l, double scale) {
  if (std::isfinite(l)) return coef * l;
  if (std::abs(coef) <= 1e-9 * scale) return 0.0;
  throw DomainError("eps' diverges logarithmically: eps'' is discontinuous at the evaluation frequency");
}

// Sum S with eps' = 1 + (2/pi) S.
double pv_sum(const PvPieces& p, const std::optional<drude::DrudeParams>& low, double wc) {
  const double w = p.omega;
  double head_coef = 0.0;
  double head_regular = 0.0;
  if (low) {
    const double wp2 = low->omega_p * low->omega_p;
    const double wt = low->omega_tau;
    head_coef = wp2 * wt / (wt * wt + w * w);
    head_regular = -wp2 * std::atan(wc / wt) / (wt * wt + w * w);
  }
  const double scale = std::max({std::abs(p.c_m), std::abs(head_coef), std::abs(p.tail_log_coef), 1e-300});
  return head_regular + p.mid + p.tail_regular + log_term(head_coef - p.c_m, p.ell_c, scale) +
         log_term(p.c_m + p.tail_log_coef, p.ell_max, scale);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

DielectricModel::DielectricModel(ExtrapolationScheme scheme, spectra::SmoothedCurve mid)
    : scheme_(std::move(scheme)), mid_(std::move(mid)) {
  if (!(scheme_.omega_c > 0.0)) throw DomainError("DielectricModel: omega_c must be positive");
  if (!(scheme_.omega_max >= scheme_.omega_c)) {
    throw DomainError("DielectricModel: omega_max must not be below omega_c");
  }
  if (!(scheme_.high_coeff >= 0.0) || !std::isfinite(scheme_.high_coeff)) {
    throw DomainError("DielectricModel: high-frequency coefficient must be finite and >= 0");
  }
  const double slack = 1e-9;
  if (mid_.omega_min() > scheme_.omega_c * (1.0 + slack) ||
      mid_.omega_max() < scheme_.omega_max * (1.0 - slack)) {
    throw DomainError("DielectricModel: smoothed data does not cover [omega_c, omega_max]");
  }
  if (scheme_.low) scheme_.low->validate();
  check_continuity();
}

DielectricModel DielectricModel::from_table(const spectra::SpectralTable& table,
                                            std::optional<drude::DrudeParams> low, double omega_c,
                                            const spectra::SmoothingOptions& smoothing) {
  if (!(omega_c > 0.0)) throw DomainError("omega_c must be positive");
  auto pts = table.with_field(spectra::Field::eps_im);
  auto first = std::find_if(pts.begin(), pts.end(),
                            [&](const spectra::SpectralPoint& p) { return p.omega >= omega_c * (1.0 - 1e-12); });
  if (first == pts.end()) {
    throw ValidationError("no eps'' data at or above omega_c = " + fmt(omega_c));
  }
  std::vector<spectra::SpectralPoint> above(first, pts.end());
  if (above.size() < smoothing.seg_len) {
    throw ValidationError("only " + std::to_string(above.size()) + " eps'' points above omega_c; need " +
                          std::to_string(smoothing.seg_len));
  }
  const spectra::SpectralTable sub(std::move(above), table.meta());
  spectra::SmoothedCurve curve = spectra::smooth_segments(sub, spectra::Field::eps_im, smoothing);

  ExtrapolationScheme s;
  s.low = std::move(low);
  s.omega_c = sub.omega_min();
  s.omega_max = sub.omega_max();
  s.high_coeff = std::max(0.0, curve.evaluate(s.omega_max)) * std::pow(s.omega_max, 3);
  return DielectricModel(std::move(s), std::move(curve));
}

double DielectricModel::eps_im(double omega) const {
  if (!(omega > 0.0)) throw DomainError("eps_im: omega must be positive");
  if (omega < scheme_.omega_c) {
    return scheme_.low ? drude::eps_real_axis(*scheme_.low, omega).im : 0.0;
  }
  if (omega <= scheme_.omega_max) return mid_eps_im(*this, omega);
  return scheme_.high_coeff / (omega * omega * omega);
}

DielectricModel DielectricModel::with_low(std::optional<drude::DrudeParams> low) const {
  ExtrapolationScheme s = scheme_;
  s.low = std::move(low);
  return DielectricModel(std::move(s), mid_);
}

void DielectricModel::check_continuity() {
  auto jump = [](double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m > 0.0 ? std::abs(a - b) / m : 0.0;
  };
  const double wc = scheme_.omega_c;
  const double wm = scheme_.omega_max;
  if (scheme_.low) {
    const double d = drude::eps_real_axis(*scheme_.low, wc).im;
    const double m = mid_.evaluate(wc);
    if (jump(d, m) > kJumpWarn) {
      warnings_.push_back("eps'' jumps by " + fmt(100.0 * jump(d, m)) + "% at omega_c = " + fmt(wc) +
                          " eV (Drude " + fmt(d) + ", data " + fmt(m) + ")");
    }
  }
  const double tail = scheme_.high_coeff / (wm * wm * wm);
  const double top = mid_.evaluate(wm);
  if (jump(tail, top) > kJumpWarn) {
    warnings_.push_back("eps'' jumps by " + fmt(100.0 * jump(tail, top)) + "% at omega_max = " + fmt(wm) +
                        " eV");
  }
  // Sample between breakpoints for negative excursions of the smoothed curve.
  const auto br = mid_.breakpoints();
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    for (int k = 0; k <= 4; ++k) {
      const double x = br[i] + (br[i + 1] - br[i]) * k / 4.0;
      if (x < wc || x > wm) continue;
      if (mid_.evaluate(x) < 0.0) {
        warnings_.push_back("smoothed eps'' is negative near " + fmt(x) + " eV; clamped to zero");
        return;
      }
    }
  }
}

// ---------------------------------------------------------------------------

double kk_real_from_imag(const DielectricModel& model, double omega, const KkOptions& opt) {
  if (!(omega > 0.0)) throw DomainError("kk_real_from_imag: omega must be positive");
  const PvPieces p = pv_pieces(model, omega, opt);
  return 1.0 + kTwoOverPi * pv_sum(p, model.scheme().low, model.omega_c());
}

double eps_contribution(const DielectricModel& model, double zeta, double omega_lo, double omega_hi,
                        const KkOptions& opt) {
  if (!(zeta > 0.0)) throw DomainError("eps_contribution: zeta must be positive");
  if (!(omega_lo >= 0.0) || !(omega_hi >= omega_lo)) {
    throw DomainError("eps_contribution: need 0 <= omega_lo <= omega_hi");
  }
  if (omega_lo == omega_hi) return 0.0;
  const double wc = model.omega_c();
  const double wm = model.omega_max();
  double total = 0.0;

  if (omega_lo < wc && model.scheme().low) {
    total += drude::eps_imag_axis_band(*model.scheme().low, omega_lo, std::min(omega_hi, wc), zeta);
  }

  const double a = std::max(omega_lo, wc);
  const double b = std::min(omega_hi, wm);
  if (b > a) {
    const double z2 = zeta * zeta;
    auto f = [&](double x) { return x * mid_eps_im(model, x) / (x * x + z2); };
    total += kTwoOverPi * quad::integrate_panels(f, mid_breaks(model, a, b), opt.tol).value;
  }

  const double C = model.scheme().high_coeff;
  const double ta = std::max(omega_lo, wm);
  if (C > 0.0 && omega_hi > ta) {
    total += kTwoOverPi * C * (cubic_tail_imag(ta, zeta) - cubic_tail_imag(omega_hi, zeta));
  }
  return total;
}

double kk_imag_axis(const DielectricModel& model, double zeta, const KkOptions& opt) {
  if (!(zeta > 0.0)) throw DomainError("kk_imag_axis: zeta must be positive");
  return 1.0 + eps_contribution(model, zeta, 0.0, std::numeric_limits<double>::infinity(), opt);
}

RegionSplit eps_regions(const DielectricModel& model, double zeta, double omega_0, const KkOptions& opt) {
  const double wc = model.omega_c();
  const double w0 = std::max(omega_0, wc);
  RegionSplit r;
  r.low = eps_contribution(model, zeta, 0.0, wc, opt);
  r.mid = eps_contribution(model, zeta, wc, w0, opt);
  r.high = eps_contribution(model, zeta, w0, std::numeric_limits<double>::infinity(), opt);
  return r;
}

// ---------------------------------------------------------------------------

KkEstimate estimate_drude_kk_report(const spectra::SpectralTable& table, double omega_c,
                                    const KkEstimateOptions& opt) {
  const DielectricModel model = DielectricModel::from_table(table, std::nullopt, omega_c, opt.smoothing);
  const double wc = model.omega_c();
  const double hi = std::min(opt.fit_omega_max, model.omega_max());

  std::vector<PvPieces> pieces;
  std::vector<double> data;
  std::optional<drude::DrudeParams> guess = opt.init;
  for (const auto& pt : table.with_field(spectra::Field::eps_re)) {
    if (pt.omega <= wc || pt.omega > hi) continue;
    pieces.push_back(pv_pieces(model, pt.omega, opt.kk));
    data.push_back(*pt.eps_re);
    if (!guess && *pt.eps_re < 1.0) {
      // Drude inversion at the lowest usable point.
      const double w = pt.omega;
      const double e2 = pt.eps_im ? *pt.eps_im : model.eps_im(w);
      const double wt = w * e2 / (1.0 - *pt.eps_re);
      const double wp = std::sqrt((1.0 - *pt.eps_re) * (w * w + wt * wt));
      if (std::isfinite(wp) && wt > 0.0 && wt < wp) guess = drude::DrudeParams{wp, wt, 1.0, {}, {}, {}};
    }
  }
  if (data.size() < 3) {
    throw ValidationError("KK estimation needs at least 3 eps' points in (omega_c, omega_max]; found " +
                          std::to_string(data.size()));
  }
  if (!guess) guess = drude::DrudeParams{5.0, 0.05, 1.0, {}, {}, {}};

  auto objective = [&](const std::array<double, 2>& x) {
    const double wp = x[0];
    const double wt = std::exp(x[1]);
    if (!(wp > 0.0) || !(wt < wp)) return std::numeric_limits<double>::infinity();
    const std::optional<drude::DrudeParams> low = drude::DrudeParams{wp, wt, 1.0, {}, {}, {}};
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double r = data[i] - (1.0 + kTwoOverPi * pv_sum(pieces[i], low, wc));
      s += r * r;
    }
    return s;
  };

  const std::array<double, 2> start{guess->omega_p, std::log(guess->omega_tau)};
  const std::array<double, 2> step{0.1 * guess->omega_p, 0.3};
  const auto res = detail::nelder_mead<2>(objective, start, step, opt.simplex_tol, opt.max_iter);

  if (!res.converged) {
    throw ConvergenceError("KK estimation did not converge in " + std::to_string(opt.max_iter) + " iterations",
                           "best omega_p=" + fmt(res.x[0]) + " omega_tau=" + fmt(std::exp(res.x[1])) +
                               " objective=" + fmt(res.value));
  }

  KkEstimate out;
  out.params = drude::make_params(res.x[0], std::exp(res.x[1]));
  out.omega_c = wc;
  out.objective = res.value;
  out.n_points = data.size();
  out.iterations = res.iterations;
  out.warnings = model.with_low(out.params).warnings();
  return out;
}

drude::DrudeParams estimate_drude_kk(const spectra::SpectralTable& table, double omega_c,
                                     const KkEstimateOptions& opt) {
  return estimate_drude_kk_report(table, omega_c, opt).params;
}

std::vector<KkCheckRow> kk_check(const DielectricModel& model, const spectra::SpectralTable& table,
                                 const KkOptions& opt) {
  std::vector<KkCheckRow> rows;
  for (const auto& pt : table.with_field(spectra::Field::eps_re)) {
    if (pt.omega <= model.omega_c() || pt.omega > model.omega_max()) continue;
    KkCheckRow r;
    r.omega = pt.omega;
    r.eps_re_data = *pt.eps_re;
    r.eps_re_kk = kk_real_from_imag(model, pt.omega, opt);
    r.rel_dev = (r.eps_re_kk - r.eps_re_data) / std::abs(r.eps_re_data);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace lifshitz::kk
