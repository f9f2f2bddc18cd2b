#include "lifshitz/serialization.hpp"

#include "lifshitz/errors.hpp"

namespace lifshitz::io {

namespace {

double number(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("Drude parameters: missing key '") + key + "'");
  if (!it->is_number()) throw ValidationError(std::string("Drude parameters: '") + key + "' is not a number");
  return it->get<double>();
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j, key);
}

}  // namespace

nlohmann::json to_json(const drude::DrudeParams& p) {
  nlohmann::json j{{"omega_p_eV", p.omega_p}, {"omega_tau_eV", p.omega_tau}, {"pol", p.pol}};
  if (p.err_p) j["err_p"] = *p.err_p;
  if (p.err_tau) j["err_tau"] = *p.err_tau;
  if (p.err_pol) j["err_pol"] = *p.err_pol;
  return j;
}

drude::DrudeParams drude_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("Drude parameters must be a JSON object");
  drude::DrudeParams p;
  p.omega_p = number(j, "omega_p_eV");
  p.omega_tau = number(j, "omega_tau_eV");
  p.pol = optional_number(j, "pol").value_or(1.0);
  p.err_p = optional_number(j, "err_p");
  p.err_tau = optional_number(j, "err_tau");
  p.err_pol = optional_number(j, "err_pol");
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  return p;
}

drude::DrudeParams drude_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  return drude_from_json(j);
}

nlohmann::json to_json(const fitting::FitReport& r) {
  nlohmann::json res = nlohmann::json::array();
  for (const auto& x : r.residuals) res.push_back({{"omega_eV", x.omega}, {"d_eps_re", x.d_re}, {"d_eps_im", x.d_im}});
  return {{"params", to_json(r.params)},
          {"chi2", r.chi2},
          {"n_points", r.n_points},
          {"iterations", r.iterations},
          {"pol_flagged", r.pol_flagged},
          {"warnings", r.warnings},
          {"residuals", res}};
}

}  // namespace lifshitz::io
