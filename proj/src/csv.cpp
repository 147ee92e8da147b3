#include "rsrl/harness/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rsrl::harness {

namespace {

constexpr const char* kSweepColumns = "cell,run,episodes,variation,budget,window,final_regret,restarts,error";
constexpr const char* kSummaryColumns =
    "cell,episodes,variation,mean_budget,mean_regret,stderr_regret,mean_restarts,runs";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad_line(std::size_t n, const std::string& why) {
  throw std::runtime_error("csv line " + std::to_string(n) + ": " + why);
}

double to_double(const std::string& s, std::size_t n) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) bad_line(n, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    bad_line(n, "not a number: '" + s + "'");
  }
}

long long to_int(const std::string& s, std::size_t n) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) bad_line(n, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    bad_line(n, "not an integer: '" + s + "'");
  }
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

// Reads the column line (skipping '#' lines, which go to `header`) and checks it.
std::size_t expect_columns(std::istream& in, const char* columns, std::map<std::string, std::string>* header) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header) {
        const auto body = line.substr(line.find_first_not_of("# "));
        const auto eq = body.find('=');
        if (eq == std::string::npos) bad_line(n, "header line without '='");
        (*header)[body.substr(0, eq)] = body.substr(eq + 1);
      }
      continue;
    }
    if (line != columns) bad_line(n, "unexpected columns '" + line + "'");
    return n;
  }
  throw std::runtime_error("csv: missing column line");
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_trace(std::ostream& out, const RegretTrace& t) {
  out << "# schema=" << kTraceSchema << '\n';
  for (const auto& [k, v] : t.header)
    if (k != "schema") out << "# " << k << '=' << v << '\n';
  out << kTraceColumns << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << i + 1 << ',' << format_double(t.v_star[i]) << ',' << format_double(t.v_pi[i]) << ','
        << format_double(t.regret_increment[i]) << ',' << format_double(t.cumulative[i]) << ','
        << format_double(t.exp_return[i]) << ',' << t.epoch_id[i] << ',' << t.restart[i] << ',' << t.test1_fail[i]
        << ',' << t.test2_fail[i] << ',' << format_double(t.exp_estimate[i]) << ',' << t.block_start[i] << '\n';
  }
}

RegretTrace read_trace(std::istream& in) {
  RegretTrace t;
  std::size_t n = expect_columns(in, kTraceColumns, &t.header);
  auto it = t.header.find("schema");
  if (it == t.header.end() || it->second != kTraceSchema) throw std::runtime_error("csv: not an rsrl trace");
  t.header.erase(it);
  std::string line;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 12) bad_line(n, "expected 12 fields, got " + std::to_string(f.size()));
    if (to_int(f[0], n) != static_cast<long long>(t.size() + 1)) bad_line(n, "episodes must be consecutive from 1");
    t.v_star.push_back(to_double(f[1], n));
    t.v_pi.push_back(to_double(f[2], n));
    t.regret_increment.push_back(to_double(f[3], n));
    t.cumulative.push_back(to_double(f[4], n));
    t.exp_return.push_back(to_double(f[5], n));
    t.epoch_id.push_back(static_cast<int>(to_int(f[6], n)));
    t.restart.push_back(static_cast<int>(to_int(f[7], n)));
    t.test1_fail.push_back(static_cast<int>(to_int(f[8], n)));
    t.test2_fail.push_back(static_cast<int>(to_int(f[9], n)));
    t.exp_estimate.push_back(to_double(f[10], n));
    t.block_start.push_back(static_cast<int>(to_int(f[11], n)));
  }
  return t;
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepColumns << '\n';
  for (const auto& r : rows) {
    out << r.cell << ',' << r.run << ',' << r.episodes << ',' << format_double(r.variation) << ','
        << format_double(r.budget) << ',' << r.window << ',' << format_double(r.final_regret) << ',' << r.restarts
        << ',' << sanitize(r.error) << '\n';
  }
}

std::vector<SweepRow> read_sweep(std::istream& in) {
  std::size_t n = expect_columns(in, kSweepColumns, nullptr);
  std::vector<SweepRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) bad_line(n, "expected 9 fields, got " + std::to_string(f.size()));
    SweepRow r;
    r.cell = static_cast<std::size_t>(to_int(f[0], n));
    r.run = static_cast<std::size_t>(to_int(f[1], n));
    r.episodes = static_cast<int>(to_int(f[2], n));
    r.variation = to_double(f[3], n);
    r.budget = to_double(f[4], n);
    r.window = static_cast<int>(to_int(f[5], n));
    r.final_regret = to_double(f[6], n);
    r.restarts = static_cast<int>(to_int(f[7], n));
    r.error = f[8];
    rows.push_back(r);
  }
  return rows;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryColumns << '\n';
  for (const auto& r : rows) {
    out << r.cell << ',' << r.episodes << ',' << format_double(r.variation) << ',' << format_double(r.mean_budget)
        << ',' << format_double(r.mean_regret) << ',' << format_double(r.stderr_regret) << ','
        << format_double(r.mean_restarts) << ',' << r.runs << '\n';
  }
}

std::vector<SummaryRow> read_summary(std::istream& in) {
  std::size_t n = expect_columns(in, kSummaryColumns, nullptr);
  std::vector<SummaryRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) bad_line(n, "expected 8 fields, got " + std::to_string(f.size()));
    SummaryRow r;
    r.cell = static_cast<std::size_t>(to_int(f[0], n));
    r.episodes = static_cast<int>(to_int(f[1], n));
    r.variation = to_double(f[2], n);
    r.mean_budget = to_double(f[3], n);
    r.mean_regret = to_double(f[4], n);
    r.stderr_regret = to_double(f[5], n);
    r.mean_restarts = to_double(f[6], n);
    r.runs = static_cast<int>(to_int(f[7], n));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace rsrl::harness
