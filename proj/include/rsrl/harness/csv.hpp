#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rsrl/harness/experiment.hpp"
#include "rsrl/oracle.hpp"

namespace rsrl::harness {

inline constexpr const char* kTraceSchema = "rsrl-trace-v1";
inline constexpr const char* kTraceColumns =
    "m,v_star,v_pi,regret_inc,cum_regret,R_m,epoch_id,restart,test1_fail,test2_fail,g_m,block_start";

/// `# key=value` header lines (schema first), the column line, one row per episode.
void write_trace(std::ostream& out, const RegretTrace& trace);
/// Throws std::runtime_error naming the offending line.
RegretTrace read_trace(std::istream& in);

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep(std::istream& in);
void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary(std::istream& in);

std::string format_double(double x);

}  // namespace rsrl::harness
