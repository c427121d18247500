#pragma once

#include <string>

#include "latsub/diffscheme.hpp"
#include "latsub/scheme.hpp"

namespace latsub {

/// Parses and validates a scheme file (JSON). Weights must be rational
/// strings; every non-zero coset needs a rule family; the zero coset may be
/// omitted for interpolatory schemes (identity is implied).
SchemeSpec parse_scheme(const std::string& path);
SchemeSpec parse_scheme_text(const std::string& text, const std::string& origin = "<memory>");

std::string serialize_scheme(const SchemeSpec& s);

std::string serialize_diff_scheme(const DifferenceScheme& ds);

}  // namespace latsub
