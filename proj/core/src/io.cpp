#include "superspine/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <boost/version.hpp>

namespace superspine {

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_header(std::ostream& os, int dim) {
  os << "replica_id,t";
  for (int i = 1; i <= dim; ++i) os << ",x_" << i;
  os << ",mass\n";
}

void write_trajectory_rows(std::ostream& os, std::size_t replica, const TrajectoryRecord& traj, int dim) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& m = traj.states[k];
    if (m.empty()) {
      os << replica << ',' << format_number(traj.times[k]);
      for (int i = 0; i < dim; ++i) os << ',';
      os << ",0\n";
      continue;
    }
    for (const auto& a : m.atoms) {
      os << replica << ',' << format_number(traj.times[k]);
      for (int i = 0; i < dim; ++i) os << ',' << format_number(a.x.x[i]);
      os << ',' << format_number(a.mass) << '\n';
    }
  }
}

void write_spine_rows(std::ostream& os, std::size_t replica, const SpinePath& spine, int dim) {
  for (std::size_t k = 0; k < spine.times.size(); ++k) {
    os << replica << ',' << format_number(spine.times[k]);
    for (int i = 0; i < dim; ++i) os << ',' << format_number(spine.locations[k].x[i]);
    os << ",1\n";
  }
}

void write_events_header(std::ostream& os) {
  os << "replica_id,kind,s,x,y_or_eps,clone_extinction_time\n";
}

void write_events_rows(std::ostream& os, std::size_t replica, const std::vector<ImmigrationEvent>& events,
                       int dim) {
  for (const auto& e : events) {
    os << replica << ',' << to_string(e.kind) << ',' << format_number(e.birth) << ',';
    for (int i = 0; i < dim; ++i) os << (i ? ";" : "") << format_number(e.source.x[i]);
    os << ',' << format_number(e.mass) << ',' << format_number(e.clone_extinction_time()) << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Frame {
  double x0, x1, y0, y1;
  static constexpr double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
  double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << x;
  return os.str();
}

std::string short_num(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

std::string render(const std::string& title, const std::string& x_label, const Frame& f,
                   const std::vector<PlotSeries>& series) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::W << "\" height=\"" << Frame::H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << Frame::W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<rect x=\"" << Frame::L << "\" y=\"" << Frame::T << "\" width=\"" << Frame::W - Frame::L - Frame::R
     << "\" height=\"" << Frame::H - Frame::T - Frame::B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = f.x0 + (f.x1 - f.x0) * i / 4.0, yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << fmt(f.px(xv)) << "\" y=\"" << Frame::H - Frame::B + 16
       << "\" text-anchor=\"middle\">" << short_num(xv) << "</text>\n";
    os << "<text x=\"" << Frame::L - 6 << "\" y=\"" << fmt(f.py(yv) + 4) << "\" text-anchor=\"end\">"
       << short_num(yv) << "</text>\n";
  }
  os << "<text x=\"" << Frame::W / 2 << "\" y=\"" << Frame::H - 12 << "\" text-anchor=\"middle\">"
     << escape(x_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      os << (i ? " " : "") << fmt(f.px(series[s].x[i])) << ',' << fmt(f.py(series[s].y[i]));
    os << "\"/>\n";
    double ly = Frame::T + 16 + 16.0 * static_cast<double>(s);
    os << "<line x1=\"" << Frame::W - 170 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << Frame::W - 150
       << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << Frame::W - 145 << "\" y=\"" << fmt(ly) << "\">" << escape(series[s].label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

Frame frame_for(const std::vector<PlotSeries>& series, bool unit_y) {
  Frame f{0.0, 1.0, 0.0, 1.0};
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        f = {s.x[i], s.x[i], s.y[i], s.y[i]};
        first = false;
      }
      f.x0 = std::min(f.x0, s.x[i]);
      f.x1 = std::max(f.x1, s.x[i]);
      f.y0 = std::min(f.y0, s.y[i]);
      f.y1 = std::max(f.y1, s.y[i]);
    }
  }
  if (unit_y) f.y0 = 0.0, f.y1 = 1.0;
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
  return f;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  t.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

std::string summary_table(const std::vector<VerificationReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "test" << std::setw(8) << "result" << std::setw(14) << "statistic"
     << std::setw(14) << "threshold" << std::setw(12) << "p_value" << "metric\n";
  for (const auto& r : reports) {
    const char* verdict = r.infeasible ? "INFEAS" : (r.pass ? "PASS" : "FAIL");
    os << std::left << std::setw(16) << r.test_id << std::setw(8) << verdict << std::setw(14)
       << short_num(r.statistic) << std::setw(14) << short_num(r.threshold) << std::setw(12)
       << (r.p_value >= 0.0 ? short_num(r.p_value) : std::string("-")) << r.metric << '\n';
  }
  return os.str();
}

std::string ecdf_svg(const std::string& title,
                     const std::vector<std::pair<std::string, std::vector<double>>>& samples) {
  std::vector<PlotSeries> series;
  for (const auto& [label, raw] : samples) {
    std::vector<double> xs = raw;
    std::sort(xs.begin(), xs.end());
    PlotSeries s{label + " (n=" + std::to_string(xs.size()) + ")", {}, {}};
    double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      s.x.push_back(xs[i]);
      s.y.push_back(static_cast<double>(i) / n);
      s.x.push_back(xs[i]);
      s.y.push_back(static_cast<double>(i + 1) / n);
    }
    series.push_back(std::move(s));
  }
  return render(title, "value", frame_for(series, true), series);
}

std::string line_svg(const std::string& title, const std::string& x_label, const std::vector<PlotSeries>& series) {
  return render(title, x_label, frame_for(series, false), series);
}

nlohmann::json version_info() {
  return {{"superspine", SUPERSPINE_VERSION},
          {"boost", BOOST_LIB_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__},
          {"csv_schema", 1},
          {"profile_format", 1}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace superspine
