#include "patred/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "patred/format.hpp"

namespace patred {

namespace {

// (metric, kind, eta) rows with a value per sweep N.
struct TrajectoryRow {
  MetricId metric;
  RedundancyKind kind;
  std::optional<double> eta;
  std::map<int, double> by_n;
};

std::string eta_field(const RedundancyConfig& c) {
  if (c.kind == RedundancyKind::kCloud) return format_real(c.eta);
  if (c.kind == RedundancyKind::kGaussCloud) return format_real(c.sd);
  return {};
}

std::vector<TrajectoryRow> trajectories(const SweepResult& result,
                                        const std::function<std::optional<double>(const SweepCombo&)>& value) {
  std::vector<TrajectoryRow> rows;
  std::map<std::tuple<int, int, double>, std::size_t> index;
  for (const auto& combo : result.combos) {
    const auto v = value(combo);
    if (!v) continue;
    const bool noisy = combo.config.kind == RedundancyKind::kCloud || combo.config.kind == RedundancyKind::kGaussCloud;
    const double eta = combo.config.kind == RedundancyKind::kCloud ? combo.config.eta : combo.config.sd;
    const auto key = std::make_tuple(static_cast<int>(combo.metric), static_cast<int>(combo.config.kind),
                                     noisy ? eta : 0.0);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back({combo.metric, combo.config.kind, noisy ? std::optional<double>(eta) : std::nullopt, {}});
    }
    rows[it->second].by_n[combo.config.n_points] = *v;
  }
  return rows;
}

std::vector<int> all_ns(const std::vector<TrajectoryRow>& rows) {
  std::vector<int> ns;
  for (const auto& r : rows) {
    for (const auto& [n, v] : r.by_n) ns.push_back(n);
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

std::string table_csv(const std::vector<TrajectoryRow>& rows, const std::string& prefix_header,
                      const std::vector<std::string>& prefixes) {
  const auto ns = all_ns(rows);
  std::ostringstream os;
  os << prefix_header << "metric,kind,eta";
  for (int n : ns) os << ",N" << n;
  os << ",min,max\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!prefixes.empty()) os << prefixes[i] << ',';
    os << to_string(r.metric) << ',' << to_string(r.kind) << ',' << (r.eta ? format_real(*r.eta) : "");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int n : ns) {
      os << ',';
      if (auto it = r.by_n.find(n); it != r.by_n.end()) {
        os << format_real(it->second);
        lo = std::min(lo, it->second);
        hi = std::max(hi, it->second);
      }
    }
    os << ',' << (r.by_n.empty() ? "" : format_real(lo)) << ',' << (r.by_n.empty() ? "" : format_real(hi)) << '\n';
  }
  return os.str();
}

std::optional<double> pick(const SweepCombo& c, Statistic s) {
  if (!c.agreement) return std::nullopt;
  switch (s) {
    case Statistic::kR2: return c.agreement->r2;
    case Statistic::kF1: return c.agreement->f1;
    case Statistic::kSeqNmi: return c.agreement->seq_nmi;
  }
  return std::nullopt;
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string polyline(std::span<const double> ys, double x0, double y0, double w, double h, double lo, double hi) {
  std::ostringstream os;
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double x = x0 + (ys.size() > 1 ? w * static_cast<double>(i) / static_cast<double>(ys.size() - 1) : 0.0);
    const double y = y0 + h - h * (ys[i] - lo) / span;
    os << (i ? " " : "") << fixed(x, 2) << ',' << fixed(y, 2);
  }
  return os.str();
}

}  // namespace

std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::kR2: return "r2";
    case Statistic::kF1: return "f1";
    case Statistic::kSeqNmi: return "seq_nmi";
  }
  return "r2";
}

std::string perturbation_name(std::size_t candidate) {
  return candidate < kPerturbationCount ? std::string(to_string(kAllPerturbations[candidate]))
                                        : std::to_string(candidate);
}

std::string sweep_csv(const SweepResult& result, const CandidateNamer& namer) {
  std::ostringstream os;
  os << "metric,mode,kind,n,eta,dataset,perturbation,distance,degenerate,rank,score,r2,f1,seq_nmi\n";
  for (const auto& combo : result.combos) {
    std::string agreement = ",,";
    if (combo.agreement) {
      agreement = format_real(combo.agreement->r2) + ',' + format_real(combo.agreement->f1) + ',' +
                  format_real(combo.agreement->seq_nmi);
    }
    const std::string prefix = std::string(to_string(combo.metric)) + ',' + std::string(to_string(combo.mode)) + ',' +
                               std::string(to_string(combo.config.kind)) + ',' +
                               std::to_string(combo.config.n_points) + ',' + eta_field(combo.config) + ',';
    for (const auto& c : combo.cells) {
      os << prefix << c.dataset << ',' << namer(c.candidate) << ',' << format_real(c.distance) << ','
         << (c.degenerate ? 1 : 0) << ',' << c.rank << ',' << format_real(c.score) << ',' << agreement << '\n';
    }
  }
  return os.str();
}

std::string trajectory_table_csv(const SweepResult& result, Statistic stat) {
  const auto rows = trajectories(result, [stat](const SweepCombo& c) { return pick(c, stat); });
  return table_csv(rows, "", {});
}

std::string per_candidate_r2_csv(const SweepResult& result, const GroundTruth& truth, const CandidateNamer& namer) {
  std::vector<TrajectoryRow> all;
  std::vector<std::string> prefixes;
  for (std::size_t p = 0; p < kPerturbationCount; ++p) {
    auto rows = trajectories(result, [&](const SweepCombo& c) -> std::optional<double> {
      return r_squared_for_candidate(c, truth, p);
    });
    for (auto& r : rows) {
      all.push_back(std::move(r));
      prefixes.push_back(namer(p));
    }
  }
  return table_csv(all, "perturbation,", prefixes);
}

std::string trajectory_svg(const SweepResult& result, Statistic stat) {
  const auto rows = trajectories(result, [stat](const SweepCombo& c) { return pick(c, stat); });
  const double row_h = 22.0;
  const double label_w = 220.0;
  const double spark_w = 170.0;
  const double width = label_w + spark_w + 130.0;
  const double height = 40.0 + row_h * static_cast<double>(rows.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"8\" y=\"18\" font-weight=\"bold\">" << to_string(stat)
     << " over redundant points per segment (N)</text>\n";
  os << "<text x=\"" << label_w + spark_w + 16 << "\" y=\"18\">min</text><text x=\"" << label_w + spark_w + 70
     << "\" y=\"18\">max</text>\n";
  double y = 30.0;
  for (const auto& r : rows) {
    std::vector<double> vals;
    for (const auto& [n, v] : r.by_n) vals.push_back(v);
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    std::string label = std::string(to_string(r.metric)) + " " + std::string(to_string(r.kind));
    if (r.eta) label += " eta=" + format_real(*r.eta);
    os << "<text x=\"8\" y=\"" << y + 14 << "\">" << svg_escape(label) << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\""
       << polyline(vals, label_w, y + 3, spark_w, row_h - 6, *lo, *hi) << "\"/>\n";
    os << "<text x=\"" << label_w + spark_w + 16 << "\" y=\"" << y + 14 << "\">" << fixed(*lo) << "</text>";
    os << "<text x=\"" << label_w + spark_w + 70 << "\" y=\"" << y + 14 << "\">" << fixed(*hi) << "</text>\n";
    y += row_h;
  }
  os << "</svg>\n";
  return os.str();
}

std::string mid_scatter_svg(std::span<const MidPoint> points) {
  const double size = 420.0;
  const double margin = 40.0;
  double extent = 0.0;
  for (const auto& p : points) extent = std::max({extent, std::abs(p.x), p.y, p.radius});
  if (!(extent > 0.0)) extent = 1.0;
  const double scale = (size - 2 * margin) / extent;
  auto sx = [&](double x) { return margin + x * scale; };
  auto sy = [&](double y) { return size - margin - y * scale; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(extent) << "\" y2=\"" << sy(0)
     << "\" stroke=\"#888\"/>\n";
  os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(extent)
     << "\" stroke=\"#888\"/>\n";
  os << "<path d=\"M " << sx(extent) << ' ' << sy(0) << " A " << extent * scale << ' ' << extent * scale
     << " 0 0 0 " << sx(0) << ' ' << sy(extent) << "\" fill=\"none\" stroke=\"#ddd\"/>\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const char* color = i == 0 ? "#d62728" : "#1f77b4";
    os << "<circle cx=\"" << fixed(sx(p.x), 2) << "\" cy=\"" << fixed(sy(p.y), 2) << "\" r=\"4\" fill=\"" << color
       << "\"/>";
    os << "<text x=\"" << fixed(sx(p.x) + 6, 2) << "\" y=\"" << fixed(sy(p.y) - 6, 2) << "\">" << svg_escape(p.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string match_strip_svg(std::span<const double> reference, std::span<const MatchResult> matches) {
  const double cell_w = 120.0;
  const double cell_h = 80.0;
  const double pad = 10.0;
  const std::size_t n = matches.size() + 1;
  const double width = pad + static_cast<double>(n) * (cell_w + pad);
  const double height = cell_h + 40.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  auto panel = [&](std::size_t i, std::span<const double> ys, const std::string& caption, const char* color) {
    const double x0 = pad + static_cast<double>(i) * (cell_w + pad);
    os << "<rect x=\"" << x0 << "\" y=\"" << pad << "\" width=\"" << cell_w << "\" height=\"" << cell_h
       << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
       << polyline(ys, x0 + 4, pad + 4, cell_w - 8, cell_h - 8, 0.0, 1.0) << "\"/>\n";
    os << "<text x=\"" << x0 << "\" y=\"" << pad + cell_h + 14 << "\">" << svg_escape(caption) << "</text>\n";
  };
  panel(0, reference, "pattern", "#d62728");
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& m = matches[i];
    panel(i + 1, m.window, "#" + std::to_string(m.rank) + " @" + std::to_string(m.start_index) + " d=" + fixed(m.distance),
          "#1f77b4");
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace patred
