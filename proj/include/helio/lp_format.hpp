#pragma once

#include <string>

#include "helio/lp.hpp"

namespace helio {

// CPLEX-LP text form. Every variable is declared in the Bounds section, so a
// parse of the output reconstructs variable order, names, and bounds exactly.
std::string lp_format_text(const LpProblem& p);
void export_lp_file(const LpProblem& p, const std::string& path);

LpProblem parse_lp_text(const std::string& text, const std::string& origin);
LpProblem parse_lp_file(const std::string& path);

}  // namespace helio
