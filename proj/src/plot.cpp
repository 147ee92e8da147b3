#include "rsrl/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rsrl/harness/csv.hpp"
#include "rsrl/harness/fit.hpp"

namespace rsrl::harness {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame make_frame(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  return {x0, x1, y0, y1};
}

void open_svg(std::ostringstream& s, const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << escape(xlabel) << "</text>\n"
    << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << kHeight / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

void axes(std::ostringstream& s, const Frame& f, bool log_axes) {
  s << "<path d=\"M" << kLeft << ',' << kTop << " V" << kHeight - kBottom << " H" << kWidth - kRight
    << "\" stroke=\"black\" fill=\"none\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    char xs[32], ys[32];
    std::snprintf(xs, sizeof xs, "%.4g", log_axes ? std::exp(xv) : xv);
    std::snprintf(ys, sizeof ys, "%.4g", log_axes ? std::exp(yv) : yv);
    s << "<text x=\"" << f.px(xv) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
      << xs << "</text>\n";
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(yv) + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << ys
      << "</text>\n";
  }
}

}  // namespace

std::string regret_curve_svg(const RegretTrace& trace, const std::string& title) {
  if (trace.size() == 0) throw std::invalid_argument("regret_curve_svg: empty trace");
  const auto [lo, hi] = std::minmax_element(trace.cumulative.begin(), trace.cumulative.end());
  const Frame f = make_frame(1.0, static_cast<double>(trace.size()), std::min(0.0, *lo), *hi);
  std::ostringstream s;
  open_svg(s, title, "episode", "cumulative regret");
  axes(s, f, false);
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  const std::size_t stride = std::max<std::size_t>(1, trace.size() / 2000);
  for (std::size_t i = 0; i < trace.size(); i += stride)
    s << f.px(static_cast<double>(i + 1)) << ',' << f.py(trace.cumulative[i]) << ' ';
  s << f.px(static_cast<double>(trace.size())) << ',' << f.py(trace.cumulative.back()) << "\"/>\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!trace.restart[i]) continue;
    s << "<line x1=\"" << f.px(static_cast<double>(i + 1)) << "\" x2=\"" << f.px(static_cast<double>(i + 1))
      << "\" y1=\"" << kTop << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"orange\" stroke-opacity=\"0.5\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string scaling_svg(const std::vector<SummaryRow>& rows, const std::string& title) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.episodes > 0 && r.mean_regret > 0.0) pts.emplace_back(r.episodes, r.mean_regret);
  if (pts.empty()) throw std::invalid_argument("scaling_svg: no positive points");
  std::sort(pts.begin(), pts.end());
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (auto [m, r] : pts) {
    x0 = std::min(x0, std::log(m));
    x1 = std::max(x1, std::log(m));
    y0 = std::min(y0, std::log(r));
    y1 = std::max(y1, std::log(r));
  }
  const Frame f = make_frame(x0, x1, y0, y1);
  std::ostringstream s;
  open_svg(s, title, "episodes M (log)", "mean final regret (log)");
  axes(s, f, true);
  for (auto [m, r] : pts)
    s << "<circle cx=\"" << f.px(std::log(m)) << "\" cy=\"" << f.py(std::log(r)) << "\" r=\"4\" fill=\"steelblue\"/>\n";
  std::vector<double> distinct;
  for (auto [m, r] : pts)
    if (distinct.empty() || distinct.back() != m) distinct.push_back(m);
  if (pts.size() >= 3 && distinct.size() >= 2) {
    const ExponentFit fit = fit_exponent(pts);
    const double ya = fit.intercept + fit.slope * x0, yb = fit.intercept + fit.slope * x1;
    s << "<line x1=\"" << f.px(x0) << "\" y1=\"" << f.py(ya) << "\" x2=\"" << f.px(x1) << "\" y2=\"" << f.py(yb)
      << "\" stroke=\"crimson\" stroke-dasharray=\"5,3\"/>\n";
    char label[64];
    std::snprintf(label, sizeof label, "slope %.4f", fit.slope);
    s << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 14 << "\" font-size=\"12\" fill=\"crimson\">" << label
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> emit_plots(const std::string& in_dir, const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(in_dir)) throw std::runtime_error("plot: '" + in_dir + "' is not a directory");
  std::vector<fs::path> inputs;
  for (const auto& e : fs::directory_iterator(in_dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") inputs.push_back(e.path());
  std::sort(inputs.begin(), inputs.end());
  fs::create_directories(out_dir);

  std::vector<std::string> written;
  auto emit = [&](const fs::path& stem, const std::string& svg) {
    const fs::path out = fs::path(out_dir) / (stem.string() + ".svg");
    std::ofstream f(out);
    f << svg;
    if (!f) throw std::runtime_error("plot: cannot write " + out.string());
    written.push_back(out.string());
  };
  for (const auto& p : inputs) {
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    try {
      if (p.filename() == "summary.csv") {
        emit(p.stem(), scaling_svg(read_summary(in), "regret scaling"));
      } else if (first.rfind("# schema=", 0) == 0) {
        const RegretTrace t = read_trace(in);
        auto it = t.header.find("agent");
        emit(p.stem(), regret_curve_svg(t, (it == t.header.end() ? std::string("agent") : it->second) +
                                               " cumulative regret"));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("plot: " + p.string() + ": " + e.what());
    }
  }
  if (written.empty()) throw std::runtime_error("plot: no trace or summary CSV found in '" + in_dir + "'");
  return written;
}

}  // namespace rsrl::harness
