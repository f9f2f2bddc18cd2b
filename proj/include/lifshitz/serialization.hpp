#pragma once

#include <string>

#include <json.hpp>

#include "lifshitz/drude.hpp"
#include "lifshitz/fitting.hpp"

namespace lifshitz::io {

// {"omega_p_eV": .., "omega_tau_eV": .., "pol": .., "err_p": .., ...}; err_* only when set.
nlohmann::json to_json(const drude::DrudeParams& p);

// Accepts the same keys; pol defaults to 1. Throws ValidationError on missing or
// non-numeric fields and on parameters outside the Drude domain.
drude::DrudeParams drude_from_json(const nlohmann::json& j);
drude::DrudeParams drude_from_string(const std::string& text);

nlohmann::json to_json(const fitting::FitReport& r);

}  // namespace lifshitz::io
