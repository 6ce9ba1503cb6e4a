#include "rtpinn/artifacts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rtpinn/errors.hpp"

#ifndef RTPINN_VERSION
#define RTPINN_VERSION "0.0.0"
#endif

namespace rtpinn {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

// Short fixed-precision text for SVG coordinates.
std::string fx(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

// Piecewise-linear approximation of the viridis map.
std::string color(double s) {
  static const std::array<std::array<double, 3>, 5> stops = {{{68, 1, 84},
                                                              {59, 82, 139},
                                                              {33, 145, 140},
                                                              {94, 201, 98},
                                                              {253, 231, 37}}};
  s = std::clamp(s, 0.0, 1.0) * 4.0;
  const int k = std::min(static_cast<int>(s), 3);
  const double f = s - k;
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string code_version() { return RTPINN_VERSION; }

nlohmann::json ArtifactHeader::to_json() const {
  return {{"version", code_version()}, {"problem", problem}, {"config_hash", config_hash}, {"seed", seed},
          {"kind", kind}};
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const ArtifactHeader& header,
                     const std::vector<std::string>& columns)
    : out_(open_out(path)), columns_(columns.size()) {
  out_ << "# rtpinn " << code_version() << "\n";
  out_ << "# kind: " << header.kind << "\n";
  out_ << "# problem: " << header.problem << "\n";
  out_ << "# config_hash: " << header.config_hash << "\n";
  out_ << "# seed: " << header.seed << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw ContractError("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << "\n";
}

void CsvWriter::text_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ContractError("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

void write_json(const std::filesystem::path& path, const ArtifactHeader& header, nlohmann::json body) {
  nlohmann::json j;
  j["header"] = header.to_json();
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

std::string heatmap_svg(const HeatmapGrid& g, const ArtifactHeader& header, int contours) {
  if (g.nx < 2 || g.ny < 2 || g.values.size() != static_cast<std::size_t>(g.nx) * g.ny) {
    throw ContractError("heatmap grid needs at least 2 x 2 values");
  }
  double lo = g.values.front();
  double hi = lo;
  for (double v : g.values) {
    if (!std::isfinite(v)) throw NumericalError("heatmap value is not finite");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;

  const double left = 70, top = 40, w = 400, h = 400, bar = 20;
  const double cw = w / g.nx, ch = h / g.ny;
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<!-- rtpinn " << code_version() << " kind=" << escape_xml(header.kind) << " problem=" << header.problem
    << " config_hash=" << header.config_hash << " seed=" << header.seed << " -->\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx(left + w + 110) << "\" height=\""
    << fx(top + h + 60) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<text x=\"" << fx(left + w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(g.title)
    << "</text>\n";
  // Cells: value (i, j) is drawn centered on its grid node, y increasing upward.
  s << "<g shape-rendering=\"crispEdges\">\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = left + i * cw;
      const double y = top + h - (j + 1) * ch;
      s << "<rect x=\"" << fx(x) << "\" y=\"" << fx(y) << "\" width=\"" << fx(cw + 0.05) << "\" height=\""
        << fx(ch + 0.05) << "\" fill=\"" << color((g.at(i, j) - lo) / span) << "\"/>\n";
    }
  }
  s << "</g>\n";

  // Marching squares on the node lattice; node (i, j) maps to the cell center.
  const auto px = [&](double i) { return left + (i + 0.5) * cw; };
  const auto py = [&](double j) { return top + h - (j + 0.5) * ch; };
  s << "<g stroke=\"white\" stroke-width=\"0.8\" fill=\"none\">\n";
  for (int c = 1; c <= contours && hi > lo; ++c) {
    const double level = lo + span * c / (contours + 1);
    std::string d;
    for (int j = 0; j + 1 < g.ny; ++j) {
      for (int i = 0; i + 1 < g.nx; ++i) {
        const double v[4] = {g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
        const double cx[4] = {0, 1, 1, 0};
        const double cy[4] = {0, 0, 1, 1};
        std::vector<std::pair<double, double>> hits;
        for (int e = 0; e < 4; ++e) {
          const int a = e, b = (e + 1) % 4;
          if ((v[a] < level) != (v[b] < level)) {
            const double f = (level - v[a]) / (v[b] - v[a]);
            hits.emplace_back(i + cx[a] + f * (cx[b] - cx[a]), j + cy[a] + f * (cy[b] - cy[a]));
          }
        }
        for (std::size_t k = 0; k + 1 < hits.size(); k += 2) {
          d += "M" + fx(px(hits[k].first)) + " " + fx(py(hits[k].second)) + "L" + fx(px(hits[k + 1].first)) + " " +
               fx(py(hits[k + 1].second));
        }
      }
    }
    if (!d.empty()) s << "<path d=\"" << d << "\"/>\n";
  }
  s << "</g>\n";

  // Axes and labels.
  s << "<rect x=\"" << fx(left) << "\" y=\"" << fx(top) << "\" width=\"" << fx(w) << "\" height=\"" << fx(h)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double f = t / 4.0;
    s << "<text x=\"" << fx(left + f * w) << "\" y=\"" << fx(top + h + 16) << "\" text-anchor=\"middle\">"
      << format_number(std::round((g.x_lo + f * (g.x_hi - g.x_lo)) * 1e4) / 1e4) << "</text>\n";
    s << "<text x=\"" << fx(left - 6) << "\" y=\"" << fx(top + h - f * h + 4) << "\" text-anchor=\"end\">"
      << format_number(std::round((g.y_lo + f * (g.y_hi - g.y_lo)) * 1e4) / 1e4) << "</text>\n";
  }
  s << "<text x=\"" << fx(left + w / 2) << "\" y=\"" << fx(top + h + 36) << "\" text-anchor=\"middle\">"
    << escape_xml(g.x_label) << "</text>\n";
  s << "<text x=\"16\" y=\"" << fx(top + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fx(top + h / 2) << ")\">" << escape_xml(g.y_label) << "</text>\n";

  // Color bar.
  const double bx = left + w + 20;
  for (int k = 0; k < 50; ++k) {
    s << "<rect x=\"" << fx(bx) << "\" y=\"" << fx(top + h - (k + 1) * h / 50) << "\" width=\"" << fx(bar)
      << "\" height=\"" << fx(h / 50 + 0.05) << "\" fill=\"" << color((k + 0.5) / 50) << "\"/>\n";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", hi);
  s << "<text x=\"" << fx(bx + bar + 4) << "\" y=\"" << fx(top + 10) << "\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.4g", lo);
  s << "<text x=\"" << fx(bx + bar + 4) << "\" y=\"" << fx(top + h) << "\">" << buf << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

void write_heatmap(const std::filesystem::path& path, const HeatmapGrid& grid, const ArtifactHeader& header,
                   int contours) {
  auto out = open_out(path);
  out << heatmap_svg(grid, header, contours);
}

}  // namespace rtpinn
