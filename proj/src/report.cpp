#include "fracwick/report.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fracwick/errors.hpp"
#include "fracwick/format.hpp"

namespace fracwick {

void write_report_csv(std::ostream& os, const std::vector<MonteCarloReport>& rows) {
  os << "test_name,n_paths,grid_n,estimate,oracle,stderr,z,verdict\n";
  for (const auto& r : rows) {
    os << r.test_name << ',' << r.n_paths << ',' << r.grid_n << ','
       << format_double(r.estimate) << ',' << format_double(r.oracle) << ','
       << format_double(r.standard_error) << ',' << format_double(r.z_score) << ','
       << (r.pass ? "pass" : "fail") << '\n';
  }
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceTable>& tables) {
  os << "study,n,rms_residual,mean_residual,stderr_mean,max_abs_residual,slope\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      os << t.name << ',' << r.n << ',' << format_double(r.rms_residual) << ','
         << format_double(r.mean_residual) << ',' << format_double(r.stderr_mean) << ','
         << format_double(r.max_abs_residual) << ',' << format_double(t.slope) << '\n';
    }
  }
}

namespace {

// Short labels for axes: 4 significant digits.
std::string label(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(4);
  os << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr double kW = 640, kH = 480, kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;

}  // namespace

std::string loglog_svg(const ConvergenceTable& table) {
  if (table.rows.empty()) throw DomainError("cannot plot an empty convergence table");
  std::vector<double> lx, ly;
  for (const auto& r : table.rows) {
    if (!(r.rms_residual > 0.0)) {
      throw DomainError("log-log plot needs positive RMS values");
    }
    lx.push_back(std::log10(static_cast<double>(r.n)));
    ly.push_back(std::log10(r.rms_residual));
  }
  auto [xmin_it, xmax_it] = std::minmax_element(lx.begin(), lx.end());
  auto [ymin_it, ymax_it] = std::minmax_element(ly.begin(), ly.end());
  double x0 = *xmin_it - 0.1, x1 = *xmax_it + 0.1;
  double y0 = *ymin_it - 0.1, y1 = *ymax_it + 0.1;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(table.name) << "</text>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
    << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& r : table.rows) {
    const double v = std::log10(static_cast<double>(r.n));
    s << "<text x=\"" << px(v) << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"middle\">" << r.n << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = y0 + (y1 - y0) * k / 4.0;
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4
      << "\" text-anchor=\"end\">" << label(std::pow(10.0, v)) << "</text>\n";
  }
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 15
    << "\" text-anchor=\"middle\">grid size n (log scale)</text>\n";
  s << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << kTop + ph / 2 << ")\">RMS residual (log scale)</text>\n";

  if (std::isfinite(table.slope)) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= lx.size();
    my /= ly.size();
    const double a = *xmin_it, b = *xmax_it;
    s << "<line x1=\"" << px(a) << "\" y1=\"" << py(my + table.slope * (a - mx))
      << "\" x2=\"" << px(b) << "\" y2=\"" << py(my + table.slope * (b - mx))
      << "\" stroke=\"steelblue\" stroke-dasharray=\"6 4\"/>\n";
    s << "<text x=\"" << kLeft + pw - 8 << "\" y=\"" << kTop + 18
      << "\" text-anchor=\"end\">fitted slope " << label(table.slope) << "</text>\n";
  }
  for (std::size_t i = 0; i < lx.size(); ++i) {
    s << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i])
      << "\" r=\"4\" fill=\"firebrick\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

namespace {

// Blue-white-red diverging map on [lo, hi].
std::string color(double v, double lo, double hi) {
  double u = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  u = std::clamp(u, 0.0, 1.0);
  int r, g, b;
  if (u < 0.5) {
    const double k = u / 0.5;
    r = static_cast<int>(49 + k * (255 - 49));
    g = static_cast<int>(54 + k * (255 - 54));
    b = static_cast<int>(149 + k * (255 - 149));
  } else {
    const double k = (u - 0.5) / 0.5;
    r = static_cast<int>(255 - k * (255 - 165));
    g = static_cast<int>(255 - k * 255);
    b = static_cast<int>(255 - k * (255 - 38));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

Eigen::MatrixXd downsample(const Eigen::MatrixXd& m, Eigen::Index cap) {
  if (m.rows() <= cap && m.cols() <= cap) return m;
  const Eigen::Index r = std::min(m.rows(), cap), c = std::min(m.cols(), cap);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, c);
  Eigen::MatrixXd count = Eigen::MatrixXd::Zero(r, c);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Eigen::Index bi = i * r / m.rows(), bj = j * c / m.cols();
      out(bi, bj) += m(i, j);
      count(bi, bj) += 1.0;
    }
  }
  return out.cwiseQuotient(count);
}

}  // namespace

std::string heatmap_svg(const Eigen::MatrixXd& matrix, const std::string& title) {
  if (matrix.size() == 0) throw DomainError("cannot plot an empty matrix");
  const Eigen::MatrixXd m = downsample(matrix, 64);
  const double lo = m.minCoeff(), hi = m.maxCoeff();
  const double side = 400.0;
  const double cw = side / m.cols(), ch = side / m.rows();
  const double ox = 60, oy = 50;

  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"500\""
    << " font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << ox + side / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      s << "<rect x=\"" << ox + j * cw << "\" y=\"" << oy + i * ch << "\" width=\"" << cw
        << "\" height=\"" << ch << "\" fill=\"" << color(m(i, j), lo, hi) << "\"/>\n";
    }
  }
  s << "<text x=\"" << ox + side / 2 << "\" y=\"" << oy + side + 25
    << "\" text-anchor=\"middle\">column index</text>\n";
  s << "<text x=\"25\" y=\"" << oy + side / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 25 "
    << oy + side / 2 << ")\">row index</text>\n";

  // Legend: vertical color bar with min / mid / max labels.
  const double lx = ox + side + 30, steps = 20, lh = side / steps;
  for (int k = 0; k < steps; ++k) {
    const double v = hi - (hi - lo) * (k + 0.5) / steps;
    s << "<rect x=\"" << lx << "\" y=\"" << oy + k * lh << "\" width=\"20\" height=\"" << lh
      << "\" fill=\"" << color(v, lo, hi) << "\"/>\n";
  }
  const double marks[] = {hi, 0.5 * (lo + hi), lo};
  for (int k = 0; k < 3; ++k) {
    s << "<text x=\"" << lx + 26 << "\" y=\"" << oy + k * side / 2 + 4 << "\">"
      << label(marks[k]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  out << text;
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for " + path.string() + ": " + std::strerror(errno));
  }
}

}  // namespace fracwick
