#pragma once

#include "fsde/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace fsde {

// Flat `key = value` configuration, `#` comments, strict unknown-key
// rejection. Keys: alpha beta gamma L K T q_kind q_exponent f_kind f_scale
// f_c0 x0_kind x0_p x0_k0 x0_amp r_target epsilon0 N_x.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ModelSpec parse_config(std::istream& in, const std::string& origin = "<stream>");
ModelSpec parse_config_file(const std::string& path);

// Resolved round-trippable echo of a spec in config syntax.
std::string render_config(const ModelSpec& spec);

} // namespace fsde
