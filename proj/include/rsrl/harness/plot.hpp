#pragma once

#include <string>
#include <vector>

#include "rsrl/harness/experiment.hpp"
#include "rsrl/oracle.hpp"

namespace rsrl::harness {

/// Cumulative-regret-vs-episode curve as a standalone SVG document.
std::string regret_curve_svg(const RegretTrace& trace, const std::string& title);
/// Log-log mean final regret against M with the fitted slope in a text label.
std::string scaling_svg(const std::vector<SummaryRow>& rows, const std::string& title);

/// Reads every trace CSV (and `summary.csv` if present) in `in_dir` and writes
/// SVGs to `out_dir`. Returns the files written. Throws on malformed input or
/// when nothing plottable is found.
std::vector<std::string> emit_plots(const std::string& in_dir, const std::string& out_dir);

}  // namespace rsrl::harness
