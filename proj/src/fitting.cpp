#include "lifshitz/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "lifshitz/errors.hpp"

namespace lifshitz::fitting {

namespace {

struct Sample {
  double omega;
  double re;
  double im;
};

std::vector<Sample> window(const spectra::SpectralTable& table, const FitConfig& cfg) {
  if (!(cfg.omega_max > cfg.omega_min)) throw DomainError("fit window needs omega_min < omega_max");
  std::vector<Sample> out;
  for (const auto& p : table.points()) {
    if (p.omega < cfg.omega_min || p.omega > cfg.omega_max) continue;
    if (!p.eps_re || !p.eps_im) continue;
    out.push_back({p.omega, *p.eps_re, *p.eps_im});
  }
  return out;
}

using Vec3 = Eigen::Vector3d;

drude::DrudeParams to_params(const Vec3& t) { return {t[0], t[1], t[2], {}, {}, {}}; }

double sum_sq(const std::vector<Sample>& s, const Vec3& t) {
  const double wp2 = t[0] * t[0];
  double acc = 0.0;
  for (const auto& x : s) {
    const double d = x.omega * x.omega + t[1] * t[1];
    const double re = t[2] - wp2 / d - x.re;
    const double im = wp2 * t[1] / (x.omega * d) - x.im;
    acc += re * re + im * im;
  }
  return acc;
}

Eigen::VectorXd residuals(const std::vector<Sample>& s, const Vec3& t) {
  Eigen::VectorXd r(2 * s.size());
  const double wp2 = t[0] * t[0];
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s[i].omega;
    const double d = w * w + t[1] * t[1];
    r[2 * i] = t[2] - wp2 / d - s[i].re;
    r[2 * i + 1] = wp2 * t[1] / (w * d) - s[i].im;
  }
  return r;
}

Eigen::MatrixXd jacobian(const std::vector<Sample>& s, const Vec3& t) {
  Eigen::MatrixXd J(2 * s.size(), 3);
  for (int k = 0; k < 3; ++k) {
    const double h = 1e-6 * std::max(std::abs(t[k]), 1e-3);
    Vec3 a = t;
    Vec3 b = t;
    a[k] += h;
    b[k] -= h;
    J.col(k) = (residuals(s, a) - residuals(s, b)) / (2.0 * h);
  }
  return J;
}

// Closed-form Drude inversion at one point with P = 1.
Vec3 initial_guess(const std::vector<Sample>& s) {
  const Sample& x = s.back();
  const double gap = 1.0 - x.re;
  if (gap > 0.0) {
    const double wt = x.omega * x.im / gap;
    const double wp = std::sqrt(gap * (x.omega * x.omega + wt * wt));
    if (std::isfinite(wp) && wt > 0.0) return {wp, wt, 1.0};
  }
  return {5.0, 0.05, 1.0};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

}  // namespace

double chi2(const spectra::SpectralTable& table, const FitConfig& cfg, const drude::DrudeParams& p) {
  return sum_sq(window(table, cfg), {p.omega_p, p.omega_tau, p.pol});
}

FitReport fit_drude(const spectra::SpectralTable& table, const FitConfig& cfg) {
  const auto s = window(table, cfg);
  if (s.size() < 4) {
    throw ValidationError("fit needs at least 4 points with both eps' and eps'' in [" + fmt(cfg.omega_min) +
                          ", " + fmt(cfg.omega_max) + "] eV; found " + std::to_string(s.size()));
  }

  Vec3 t = cfg.init ? Vec3{cfg.init->omega_p, cfg.init->omega_tau, cfg.init->pol} : initial_guess(s);
  double S = sum_sq(s, t);
  const double floor = 1e-28 * static_cast<double>(s.size());
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;

  for (; it < cfg.max_iter; ++it) {
    if (S <= floor) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd J = jacobian(s, t);
    const Eigen::VectorXd r = residuals(s, t);
    const Eigen::Matrix3d A = J.transpose() * J;
    const Vec3 g = J.transpose() * r;

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix3d M = A;
      for (int k = 0; k < 3; ++k) M(k, k) += lambda * std::max(A(k, k), 1e-300);
      const Vec3 step = M.ldlt().solve(-g);
      const Vec3 cand = t + step;
      const double Sc = cand[1] > 0.0 ? sum_sq(s, cand) : std::numeric_limits<double>::infinity();
      if (Sc < S) {
        const double drop = S - Sc;
        const double rel_step = (step.array().abs() / (t.array().abs() + 1e-12)).maxCoeff();
        t = cand;
        S = Sc;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (drop <= cfg.tol * S || rel_step < 1e-14) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    // No downhill step exists at working precision: t is the minimum.
    if (!accepted) converged = true;
    if (converged) break;
  }

  if (!converged) {
    throw ConvergenceError("Drude fit did not converge in " + std::to_string(cfg.max_iter) + " iterations",
                           "best omega_p=" + fmt(t[0]) + " omega_tau=" + fmt(t[1]) + " P=" + fmt(t[2]) +
                               " chi2=" + fmt(S));
  }

  FitReport rep;
  rep.params = to_params(t);
  rep.chi2 = S;
  rep.n_points = s.size();
  rep.iterations = it;
  const Eigen::VectorXd r = residuals(s, t);
  for (std::size_t i = 0; i < s.size(); ++i) rep.residuals.push_back({s[i].omega, r[2 * i], r[2 * i + 1]});
  if (!(t[1] > 0.0 && t[1] < t[0])) {
    rep.warnings.push_back("fitted parameters violate 0 < omega_tau < omega_p");
  }
  if (std::abs(t[2]) > kPolFlag) {
    rep.pol_flagged = true;
    rep.warnings.push_back("polarization constant |P| = " + fmt(std::abs(t[2])) + " exceeds " + fmt(kPolFlag));
  }
  try {
    const ParamErrors e = param_errors(table, cfg, rep.params);
    rep.params.err_p = e.err_p;
    rep.params.err_tau = e.err_tau;
    rep.params.err_pol = e.err_pol;
  } catch (const ConvergenceError& ex) {
    rep.warnings.push_back(std::string("error bars unavailable: ") + ex.what());
  }
  return rep;
}

double delta_chi2_halfwidth(const std::function<double(double)>& f, double theta0, double f_min,
                            double delta, double scale) {
  if (!(scale > 0.0)) throw DomainError("delta_chi2_halfwidth: scale must be positive");
  if (!(delta > 0.0)) return 0.0;
  const double limit = 10.0 * scale;

  auto side = [&](double dir) {
    auto rise = [&](double h) { return f(theta0 + dir * h) - f_min - delta; };
    double lo = 0.0;
    double hi = scale * 1e-12;
    while (rise(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > limit) {
        throw ConvergenceError("chi^2 does not rise by " + fmt(delta) + " within 10x the parameter scale (" +
                               (dir > 0 ? "upward" : "downward") + " from " + fmt(theta0) + ")");
      }
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (rise(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return 0.5 * (side(+1.0) + side(-1.0));
}

ParamErrors param_errors(const spectra::SpectralTable& table, const FitConfig& cfg,
                         const drude::DrudeParams& best) {
  const auto s = window(table, cfg);
  if (s.size() < 4) throw ValidationError("param_errors needs at least 4 points in the window");
  const Vec3 t0{best.omega_p, best.omega_tau, best.pol};
  const double S0 = sum_sq(s, t0);
  const double s2 = S0 / static_cast<double>(2 * s.size() - 3);

  std::array<double, 3> err{};
  for (int k = 0; k < 3; ++k) {
    auto f = [&](double v) {
      Vec3 t = t0;
      t[k] = v;
      return sum_sq(s, t);
    };
    const double scale = k == 2 ? std::max(std::abs(t0[k]), 1.0) : std::abs(t0[k]);
    err[static_cast<std::size_t>(k)] = delta_chi2_halfwidth(f, t0[k], S0, s2, scale);
  }
  return {err[0], err[1], err[2]};
}

// ---------------------------------------------------------------------------

double SensitivityTable::spread_p(std::size_t i) const {
  return std::abs(rows.at(1).results.at(i).eta - rows.at(2).results.at(i).eta);
}

double SensitivityTable::spread_tau(std::size_t i) const {
  return std::abs(rows.at(3).results.at(i).eta - rows.at(4).results.at(i).eta);
}

SensitivityTable sensitivity_table(const drude::DrudeParams& base, double delta_p, double delta_tau,
                                   std::span<const double> distances, const casimir::ForceOptions& opt,
                                   const MirrorFactory& factory) {
  base.validate();
  if (!(delta_p >= 0.0 && delta_p < 1.0) || !(delta_tau >= 0.0 && delta_tau < 1.0)) {
    throw DomainError("relative variations must lie in [0, 1)");
  }
  for (double L : distances) {
    if (!(L > 0.0)) throw DomainError("distances must be positive");
  }

  auto vary = [&](double fp, double ft) {
    drude::DrudeParams p = base;
    p.omega_p *= fp;
    p.omega_tau *= ft;
    p.err_p.reset();
    p.err_tau.reset();
    p.err_pol.reset();
    p.validate();
    return p;
  };

  SensitivityTable out;
  out.distances.assign(distances.begin(), distances.end());
  out.rows = {
      {"base", vary(1.0, 1.0), {}},
      {"omega_p+", vary(1.0 + delta_p, 1.0), {}},
      {"omega_p-", vary(1.0 - delta_p, 1.0), {}},
      {"omega_tau+", vary(1.0, 1.0 + delta_tau), {}},
      {"omega_tau-", vary(1.0, 1.0 - delta_tau), {}},
  };
  for (auto& row : out.rows) {
    const casimir::MirrorSpec m = factory ? factory(row.params) : casimir::MirrorSpec::drude(row.params, row.label);
    row.results = casimir::reduction_factors(m, distances, opt);
  }
  return out;
}

}  // namespace lifshitz::fitting
