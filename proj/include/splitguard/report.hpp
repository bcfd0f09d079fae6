#pragma once

#include <string>
#include <string_view>

#include "splitguard/evalsim.hpp"

namespace splitguard {

/// JSON documents carry schema_version and a "kind" of "experiment" or
/// "simulation", plus metadata naming the averaging mode, the sd convention
/// and the comparison test.
std::string experiment_to_json(const ExperimentReport& report);
std::string simulation_to_json(const Simulation& sim);

/// Markdown tables (scheme x Acc/Prec/Rec/F1, "mean ± sd" in percent) for
/// either kind of JSON document. Throws ParseError on unrecognised input.
std::string render_markdown(std::string_view json_text);

/// "97.33 ± 1.86" from fractions 0.9733 and 0.0186.
std::string format_percent_pm(double mean, double sd);

}  // namespace splitguard
