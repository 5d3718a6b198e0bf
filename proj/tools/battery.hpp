#pragma once

#include <nlohmann/json.hpp>

namespace bgdce {

// Cross-check battery behind the `validate` subcommand: every fast path is
// compared against its brute-force counterpart on small fixtures. Returns
// {"checks": [{name, pass, ...}], "all_pass": bool}.
nlohmann::json run_validation_battery();

}  // namespace bgdce
