// lifshitz: optical data -> Drude parameters -> eps(i zeta) -> Casimir reduction factors.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lifshitz/casimir.hpp"
#include "lifshitz/constants.hpp"
#include "lifshitz/drude.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/fitting.hpp"
#include "lifshitz/kk.hpp"
#include "lifshitz/serialization.hpp"
#include "lifshitz/spectra.hpp"

namespace {

using namespace lifshitz;

enum Exit : int { kOk = 0, kConfig = 2, kData = 3, kConvergence = 4, kIo = 5 };

const char* kExitHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  2  configuration error (bad flags, missing files, bad CASIMIR_QUAD_TOL)\n"
    "  3  data validation error (malformed CSV, non-ascending or non-passive data, bad merge)\n"
    "  4  convergence error (minimizer or quadrature did not converge)\n"
    "  5  I/O error\n"
    "Environment:\n"
    "  CASIMIR_QUAD_TOL  relative/absolute quadrature tolerance (default 1e-8)\n";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string input_high;
  std::string format = "eps";
  std::string output;
  std::optional<double> omega_c;
  std::optional<double> omega_joint;
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  std::vector<double> distances_um{0.1, 0.3, 0.5, 1.0, 3.0};
  double delta_p = 0.15;
  double delta_tau = 0.30;
  std::vector<std::string> params_files;
  std::vector<std::string> drude_inline;
  double zeta_min = 1e-3;
  double zeta_max = 1e3;
  std::size_t points = 61;
};

// Every numeric output line goes through here so repeated runs are byte-identical.
std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

quad::Tolerance quad_tolerance() {
  const char* env = std::getenv("CASIMIR_QUAD_TOL");
  if (!env || !*env) return {};
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0) || !(v < 1.0)) {
    throw ConfigError(std::string("CASIMIR_QUAD_TOL must be a number in (0, 1), got '") + env + "'");
  }
  return {v, v};
}

spectra::TableFormat table_format(const std::string& f) {
  return f == "nk" ? spectra::TableFormat::nk : spectra::TableFormat::eps;
}

spectra::SpectralTable load_input(const Options& o) {
  if (o.input.empty()) throw ConfigError("--input is required");
  spectra::SpectralTable t = spectra::load_table(o.input, table_format(o.format));
  if (o.input_high.empty()) return t;
  if (!o.omega_joint) throw ConfigError("--input-high needs --omega-joint");
  return spectra::merge_tables(t, spectra::load_table(o.input_high, table_format(o.format)), *o.omega_joint);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<drude::DrudeParams> drude_sets(const Options& o) {
  std::vector<drude::DrudeParams> out;
  for (const auto& s : o.drude_inline) out.push_back(io::drude_from_string(s));
  for (const auto& f : o.params_files) out.push_back(io::drude_from_string(read_file(f)));
  return out;
}

drude::DrudeParams single_drude(const Options& o) {
  const auto sets = drude_sets(o);
  if (sets.size() != 1) throw ConfigError("exactly one of --drude / --params is required");
  return sets.front();
}

std::vector<double> distances_m(const Options& o) {
  std::vector<double> out;
  for (std::size_t i = 0; i < o.distances_um.size(); ++i) {
    const double d = o.distances_um[i];
    if (!(d > 0.0)) throw ConfigError("--distances must be positive");
    if (i > 0 && !(d > o.distances_um[i - 1])) throw ConfigError("--distances must be ascending");
    out.push_back(d * constants::kMetersPerMicron);
  }
  if (out.empty()) throw ConfigError("--distances is empty");
  return out;
}

// Output sink: the --output file, or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return path_.empty() ? std::cout : file_; }
  void close() {
    if (!path_.empty()) {
      file_.close();
      if (!file_) throw IoError("write failed for '" + path_ + "'");
    }
  }

 private:
  std::string path_;
  std::ofstream file_;
};

// '#' block recording the full configuration of a CSV output.
void config_header(std::ostream& os, const std::string& command, const Options& o, const quad::Tolerance& tol) {
  os << "# lifshitz " << command << "\n";
  if (!o.input.empty()) os << "# input = " << o.input << " (" << o.format << ")\n";
  if (!o.input_high.empty()) os << "# input_high = " << o.input_high << "\n";
  if (o.omega_joint) os << "# omega_joint_eV = " << num(*o.omega_joint) << "\n";
  if (o.omega_c) os << "# omega_c_eV = " << num(*o.omega_c) << "\n";
  if (o.omega_min) os << "# omega_min_eV = " << num(*o.omega_min) << "\n";
  if (o.omega_max) os << "# omega_max_eV = " << num(*o.omega_max) << "\n";
  for (const auto& s : o.drude_inline) os << "# drude = " << s << "\n";
  for (const auto& s : o.params_files) os << "# params = " << s << "\n";
  if (command == "eta" || command == "force" || command == "sensitivity") {
    os << "# distances_um = ";
    for (std::size_t i = 0; i < o.distances_um.size(); ++i) os << (i ? "," : "") << num(o.distances_um[i]);
    os << "\n";
  }
  os << "# quad_tol = " << num(tol.rel) << "\n";
}

std::shared_ptr<const kk::DielectricModel> table_model(const Options& o, const spectra::SpectralTable& t,
                                                       std::optional<drude::DrudeParams> low) {
  return std::make_shared<const kk::DielectricModel>(
      kk::DielectricModel::from_table(t, std::move(low), o.omega_c.value_or(0.125)));
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

// ---------------------------------------------------------------------------

int cmd_fit_drude(const Options& o) {
  const auto table = load_input(o);
  fitting::FitConfig cfg;
  if (o.omega_min) cfg.omega_min = *o.omega_min;
  if (o.omega_max) cfg.omega_max = *o.omega_max;
  const auto sets = drude_sets(o);
  if (!sets.empty()) cfg.init = sets.front();

  const fitting::FitReport rep = fitting::fit_drude(table, cfg);
  Sink out(o.output);
  out.os() << io::to_json(rep).dump(2) << "\n";
  out.close();

  const auto& p = rep.params;
  auto pm = [](const std::optional<double>& e) { return e ? " +/- " + num(*e) : std::string(); };
  std::cerr << "source             omega_p (eV)            omega_tau (eV)          P\n"
            << std::left << std::setw(19) << (table.meta().source.empty() ? o.input : table.meta().source)
            << num(p.omega_p) << pm(p.err_p) << "   " << num(p.omega_tau) << pm(p.err_tau) << "   "
            << num(p.pol) << pm(p.err_pol) << "\n"
            << "chi2 = " << num(rep.chi2) << " over " << rep.n_points << " points\n";
  print_warnings(rep.warnings);
  return kOk;
}

int cmd_estimate_kk(const Options& o, const quad::Tolerance& tol) {
  const auto table = load_input(o);
  kk::KkEstimateOptions opt;
  opt.kk.tol = tol;
  if (o.omega_max) opt.fit_omega_max = *o.omega_max;
  const auto sets = drude_sets(o);
  if (!sets.empty()) opt.init = sets.front();
  const kk::KkEstimate est = kk::estimate_drude_kk_report(table, o.omega_c.value_or(0.125), opt);

  nlohmann::json j{{"params", io::to_json(est.params)},
                   {"omega_c_eV", est.omega_c},
                   {"objective", est.objective},
                   {"n_points", est.n_points},
                   {"iterations", est.iterations},
                   {"warnings", est.warnings}};
  Sink out(o.output);
  out.os() << j.dump(2) << "\n";
  out.close();
  std::cerr << "omega_p = " << num(est.params.omega_p) << " eV, omega_tau = " << num(est.params.omega_tau)
            << " eV (omega_c snapped to " << num(est.omega_c) << " eV, " << est.n_points << " points)\n";
  print_warnings(est.warnings);
  return kOk;
}

int cmd_kk_check(const Options& o, const quad::Tolerance& tol) {
  const auto table = load_input(o);
  const double wc = o.omega_c.value_or(0.125);
  kk::KkOptions kopt{tol};
  const auto sets = drude_sets(o);
  drude::DrudeParams low;
  if (!sets.empty()) {
    low = sets.front();
  } else {
    kk::KkEstimateOptions eo;
    eo.kk = kopt;
    low = kk::estimate_drude_kk(table, wc, eo);
  }
  const auto model = table_model(o, table, low);
  const auto rows = kk::kk_check(*model, table, kopt);

  Sink out(o.output);
  config_header(out.os(), "kk-check", o, tol);
  out.os() << "# low_drude = " << io::to_json(low).dump() << "\n";
  out.os() << "omega_eV,eps_re_data,eps_re_kk,rel_dev\n";
  double worst = 0.0;
  for (const auto& r : rows) {
    out.os() << num(r.omega) << "," << num(r.eps_re_data) << "," << num(r.eps_re_kk) << "," << num(r.rel_dev)
             << "\n";
    worst = std::max(worst, std::abs(r.rel_dev));
  }
  out.close();
  std::cerr << rows.size() << " points, max |rel_dev| = " << num(worst) << "\n";
  print_warnings(model->warnings());
  return kOk;
}

int cmd_eps_imag_axis(const Options& o, const quad::Tolerance& tol) {
  if (!(o.zeta_min > 0.0) || !(o.zeta_max > o.zeta_min) || o.points < 2) {
    throw ConfigError("need 0 < --zeta-min < --zeta-max and --points >= 2");
  }
  std::optional<drude::DrudeParams> low;
  const auto sets = drude_sets(o);
  if (!sets.empty()) low = sets.front();
  casimir::MirrorSpec mirror;
  if (!o.input.empty()) {
    const auto model = table_model(o, load_input(o), low);
    print_warnings(model->warnings());
    mirror = casimir::MirrorSpec::model(model, o.input);
  } else {
    if (!low) throw ConfigError("eps-imag-axis needs --input or Drude parameters");
    mirror = casimir::MirrorSpec::drude(*low, "drude");
  }

  Sink out(o.output);
  config_header(out.os(), "eps-imag-axis", o, tol);
  out.os() << "zeta_eV,eps\n";
  for (double z : quad::log_grid(o.zeta_min, o.zeta_max, o.points)) {
    out.os() << num(z) << "," << num(mirror.eps(z, kk::KkOptions{tol})) << "\n";
  }
  out.close();
  return kOk;
}

// Mirror for one Drude set: pure Drude, or tabulated data above omega_c when --input is given.
fitting::MirrorFactory mirror_factory(const Options& o) {
  if (o.input.empty()) return {};
  const auto base = table_model(o, load_input(o), std::nullopt);
  print_warnings(base->warnings());
  return [base, label = o.input](const drude::DrudeParams& p) {
    return casimir::MirrorSpec::model(std::make_shared<const kk::DielectricModel>(base->with_low(p)), label);
  };
}

casimir::MirrorSpec make_mirror(const fitting::MirrorFactory& f, const drude::DrudeParams& p) {
  return f ? f(p) : casimir::MirrorSpec::drude(p, "drude");
}

void eta_header(std::ostream& os, const std::vector<double>& um) {
  os << "label,omega_p_eV,omega_tau_eV";
  for (double d : um) os << ",eta_" << num(d) << "um";
  os << "\n";
}

int cmd_eta(const Options& o, const casimir::ForceOptions& fopt) {
  const auto Ls = distances_m(o);
  const auto sets = drude_sets(o);
  if (sets.empty()) throw ConfigError("eta needs at least one --drude or --params");
  const auto factory = mirror_factory(o);

  Sink out(o.output);
  config_header(out.os(), "eta", o, fopt.tol);
  eta_header(out.os(), o.distances_um);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto res = casimir::reduction_factors(make_mirror(factory, sets[i]), Ls, fopt);
    out.os() << "set" << i + 1 << "," << num(sets[i].omega_p) << "," << num(sets[i].omega_tau);
    for (const auto& r : res) out.os() << "," << num(r.eta);
    out.os() << "\n";
  }
  out.close();
  return kOk;
}

int cmd_force(const Options& o, const casimir::ForceOptions& fopt) {
  const auto Ls = distances_m(o);
  const auto p = single_drude(o);
  const auto res = casimir::reduction_factors(make_mirror(mirror_factory(o), p), Ls, fopt);

  Sink out(o.output);
  config_header(out.os(), "force", o, fopt.tol);
  out.os() << "L_m,force_Pa,eta,quad_err\n";
  for (const auto& r : res) {
    out.os() << num(r.L) << "," << num(r.force) << "," << num(r.eta) << "," << num(r.quad_err) << "\n";
  }
  out.close();
  return kOk;
}

int cmd_sensitivity(const Options& o, const casimir::ForceOptions& fopt) {
  const auto Ls = distances_m(o);
  const auto base = single_drude(o);
  const auto table = fitting::sensitivity_table(base, o.delta_p, o.delta_tau, Ls, fopt, mirror_factory(o));

  Sink out(o.output);
  config_header(out.os(), "sensitivity", o, fopt.tol);
  out.os() << "# delta_p = " << num(o.delta_p) << "\n# delta_tau = " << num(o.delta_tau) << "\n";
  eta_header(out.os(), o.distances_um);
  for (const auto& row : table.rows) {
    out.os() << row.label << "," << num(row.params.omega_p) << "," << num(row.params.omega_tau);
    for (const auto& r : row.results) out.os() << "," << num(r.eta);
    out.os() << "\n";
  }
  out.close();
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    std::cerr << "L = " << num(o.distances_um[i]) << " um: eta spread " << num(table.spread_p(i))
              << " (omega_p), " << num(table.spread_tau(i)) << " (omega_tau)\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir force between metal plates from tabulated optical data"};
  app.footer(kExitHelp);
  app.require_subcommand(1);

  Options o;
  auto data_flags = [&](CLI::App* sub, bool need_input) {
    auto* in = sub->add_option("--input", o.input, "optical data CSV")->check(CLI::ExistingFile);
    if (need_input) in->required();
    sub->add_option("--format", o.format, "CSV layout")->check(CLI::IsMember({"eps", "nk"}));
    sub->add_option("--input-high", o.input_high, "high-frequency CSV merged above --omega-joint")
        ->check(CLI::ExistingFile);
    sub->add_option("--omega-joint", o.omega_joint, "merge frequency (eV)");
  };
  auto drude_flags = [&](CLI::App* sub) {
    sub->add_option("--drude", o.drude_inline, "Drude parameters as inline JSON");
    sub->add_option("--params", o.params_files, "Drude parameters JSON file")->check(CLI::ExistingFile);
  };
  auto out_flag = [&](CLI::App* sub) { sub->add_option("--output", o.output, "output file (default stdout)"); };
  auto dist_flag = [&](CLI::App* sub) {
    sub->add_option("--distances", o.distances_um, "plate separations in um, comma separated")->delimiter(',');
  };

  auto* fit = app.add_subcommand("fit-drude", "chi^2 fit of (omega_p, omega_tau, P) to eps' and eps''");
  data_flags(fit, true);
  drude_flags(fit);
  out_flag(fit);
  fit->add_option("--omega-min", o.omega_min, "fit window lower edge (eV)");
  fit->add_option("--omega-max", o.omega_max, "fit window upper edge (eV, default 1)");

  auto* est = app.add_subcommand("estimate-drude-kk", "Drude parameters from Kramers-Kronig consistency");
  data_flags(est, true);
  drude_flags(est);
  out_flag(est);
  est->add_option("--omega-c", o.omega_c, "Drude/data boundary (eV, default 0.125)");
  est->add_option("--omega-max", o.omega_max, "upper edge of the eps' points used (eV)");

  auto* chk = app.add_subcommand("kk-check", "tabulated eps' against its KK prediction");
  data_flags(chk, true);
  drude_flags(chk);
  out_flag(chk);
  chk->add_option("--omega-c", o.omega_c, "Drude/data boundary (eV, default 0.125)");

  auto* eia = app.add_subcommand("eps-imag-axis", "eps(i zeta) on a log grid");
  data_flags(eia, false);
  drude_flags(eia);
  out_flag(eia);
  eia->add_option("--omega-c", o.omega_c, "Drude/data boundary (eV, default 0.125)");
  eia->add_option("--zeta-min", o.zeta_min, "eV");
  eia->add_option("--zeta-max", o.zeta_max, "eV");
  eia->add_option("--points", o.points, "grid size");

  auto* eta = app.add_subcommand("eta", "reduction factors, one row per Drude parameter set");
  data_flags(eta, false);
  drude_flags(eta);
  out_flag(eta);
  dist_flag(eta);
  eta->add_option("--omega-c", o.omega_c, "Drude/data boundary when --input is given (eV)");

  auto* force = app.add_subcommand("force", "Lifshitz force per unit area");
  data_flags(force, false);
  drude_flags(force);
  out_flag(force);
  dist_flag(force);
  force->add_option("--omega-c", o.omega_c, "Drude/data boundary when --input is given (eV)");

  auto* sens = app.add_subcommand("sensitivity", "eta under omega_p and omega_tau variations");
  data_flags(sens, false);
  drude_flags(sens);
  out_flag(sens);
  dist_flag(sens);
  sens->add_option("--omega-c", o.omega_c, "Drude/data boundary when --input is given (eV)");
  sens->add_option("--delta-p", o.delta_p, "relative omega_p variation (default 0.15)");
  sens->add_option("--delta-tau", o.delta_tau, "relative omega_tau variation (default 0.30)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const quad::Tolerance tol = quad_tolerance();
    casimir::ForceOptions fopt;
    fopt.tol = tol;
    if (*fit) return cmd_fit_drude(o);
    if (*est) return cmd_estimate_kk(o, tol);
    if (*chk) return cmd_kk_check(o, tol);
    if (*eia) return cmd_eps_imag_axis(o, tol);
    if (*eta) return cmd_eta(o, fopt);
    if (*force) return cmd_force(o, fopt);
    if (*sens) return cmd_sensitivity(o, fopt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    if (!e.trace().empty()) std::cerr << "  " << e.trace() << "\n";
    return kConvergence;
  } catch (const QuadratureError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kConvergence;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return kConfig;
}
