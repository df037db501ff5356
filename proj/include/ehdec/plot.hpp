#pragma once

// Minimal CSV reader and SVG line / heatmap charts for the experiment outputs.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehdec {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::invalid_argument("CSV has no column \"" + name + "\"");
  }
  bool has(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
  }
  std::vector<double> numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(c < r.size() && !r[c].empty() ? std::stod(r[c]) : NAN);
    return out;
  }
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_csv(in);
}

struct Series {
  std::string label;
  std::vector<double> x, y;
};

namespace detail {

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  return colors[i % 6];
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace detail

inline void write_line_chart(std::ostream& os, const std::vector<Series>& series,
                             const std::string& title, const std::string& xlabel,
                             const std::string& ylabel) {
  const double W = 640, H = 420, L = 70, R = 140, T = 40, B = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  ymin = std::min(ymin, 0.0);
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n"
     << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4, yv = ymin + (ymax - ymin) * t / 4;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
       << detail::fmt(xv) << "</text>\n"
       << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
       << detail::fmt(yv) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
     << xlabel << "</text>\n"
     << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << detail::palette(k) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "\"/>\n"
       << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" fill=\""
       << detail::palette(k) << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

inline void write_heatmap(std::ostream& os, const std::vector<double>& xs,
                          const std::vector<double>& ys, const std::vector<double>& zs,
                          const std::string& title, const std::string& xlabel,
                          const std::string& ylabel) {
  std::vector<double> ux(xs), uy(ys);
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
  const double zmin = *std::min_element(zs.begin(), zs.end());
  const double zmax = *std::max_element(zs.begin(), zs.end());
  const double L = 70, T = 40, cell = 30;
  const double W = L + cell * ux.size() + 40, H = T + cell * uy.size() + 60;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const auto ix = std::lower_bound(ux.begin(), ux.end(), xs[k]) - ux.begin();
    const auto iy = std::lower_bound(uy.begin(), uy.end(), ys[k]) - uy.begin();
    const double u = zmax > zmin ? (zs[k] - zmin) / (zmax - zmin) : 0.0;
    const int red = static_cast<int>(255 * u), blue = static_cast<int>(255 * (1 - u));
    os << "<rect x=\"" << L + cell * ix << "\" y=\"" << T + cell * (uy.size() - 1 - iy)
       << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << red << ",64,"
       << blue << ")\"><title>" << detail::fmt(zs[k]) << "</title></rect>\n";
  }
  os << "<text x=\"" << L + cell * ux.size() / 2 << "\" y=\"" << H - 16
     << "\" text-anchor=\"middle\">" << xlabel << " (" << detail::fmt(ux.front()) << " .. "
     << detail::fmt(ux.back()) << ")</text>\n"
     << "<text x=\"16\" y=\"" << T + cell * uy.size() / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << T + cell * uy.size() / 2 << ")\">" << ylabel << "</text>\n"
     << "</svg>\n";
}

// Picks a chart from the CSV schema: reward grid -> heatmap, per-slot series
// -> one line per node for `metric`, arrival sweep -> bound curves.
inline void plot_csv(const CsvTable& t, std::ostream& os, const std::string& metric,
                     const std::string& title) {
  if (t.has("a1") && t.has("a2") && t.has("reward")) {
    write_heatmap(os, t.numbers("a1"), t.numbers("a2"), t.numbers("reward"), title, "a1", "a2");
    return;
  }
  if (t.has("slot") && t.has("node")) {
    const auto slot = t.numbers("slot"), node = t.numbers("node"), y = t.numbers(metric);
    std::map<int, Series> by_node;
    for (std::size_t i = 0; i < slot.size(); ++i) {
      auto& s = by_node[static_cast<int>(node[i])];
      s.label = "node " + std::to_string(static_cast<int>(node[i]));
      s.x.push_back(slot[i]);
      s.y.push_back(y[i]);
    }
    std::vector<Series> series;
    for (auto& [_, s] : by_node) series.push_back(std::move(s));
    write_line_chart(os, series, title, "slot", metric);
    return;
  }
  if (t.has("p_b") && t.has("centralized") && t.has("decentralized")) {
    std::map<std::string, std::pair<Series, Series>> groups;
    const auto pb = t.numbers("p_b"), c = t.numbers("centralized"), d = t.numbers("decentralized");
    const std::size_t gi = t.has("initial") ? t.column("initial") : t.header.size();
    for (std::size_t i = 0; i < pb.size(); ++i) {
      const std::string g = gi < t.rows[i].size() ? t.rows[i][gi] : "";
      auto& [cs, ds] = groups[g];
      cs.label = "centralized " + g;
      ds.label = "decentralized " + g;
      cs.x.push_back(pb[i]);
      cs.y.push_back(c[i]);
      ds.x.push_back(pb[i]);
      ds.y.push_back(d[i]);
    }
    std::vector<Series> series;
    for (auto& [_, pr] : groups) {
      series.push_back(std::move(pr.first));
      series.push_back(std::move(pr.second));
    }
    write_line_chart(os, series, title, "p_b", "discounted reward");
    return;
  }
  // Generic: first column as x, the rest as series.
  std::vector<Series> series;
  const auto x = t.numbers(t.header.at(0));
  for (std::size_t c = 1; c < t.header.size(); ++c)
    series.push_back({t.header[c], x, t.numbers(t.header[c])});
  write_line_chart(os, series, title, t.header.at(0), "value");
}

}  // namespace ehdec
