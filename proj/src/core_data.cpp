#include "patred/core_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "patred/error.hpp"

namespace patred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::size_t resolve_column(const CsvTable& table, std::string_view name) {
  if (table.header.empty()) throw Error(ErrorCode::kParse, "CSV has no header row");
  if (name.empty()) return table.header.size() - 1;
  if (auto idx = table.column(name)) return *idx;
  throw Error(ErrorCode::kMissingColumn, "column '" + std::string(name) + "' not found in CSV header");
}

std::vector<double> numeric_column(const CsvTable& table, std::size_t col) {
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    // Header is line 1, so data row r sits on line r + 2.
    if (col >= row.size()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(r + 2) + ": missing value for column '" +
                                         table.header[col] + "'");
    }
    auto v = parse_real(row[col]);
    if (!v) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(r + 2) + ", column '" + table.header[col] +
                                         "': cannot parse '" + row[col] + "' as a finite real");
    }
    out.push_back(*v);
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

// ---- TimeSeries / Pattern / PointSet ---------------------------------------

TimeSeries::TimeSeries(std::vector<double> values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.size() < 2) {
    throw Error(ErrorCode::kTooShort, "time series too short: need at least 2 values, got " +
                                          std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "time series value " + std::to_string(i) + " is not finite");
    }
  }
  if (!labels_.empty() && labels_.size() != values_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "labels and values differ in length");
  }
}

Pattern::Pattern(std::vector<Point> points, std::string name)
    : points_(std::move(points)), name_(std::move(name)) {
  if (points_.size() < 2) {
    throw Error(ErrorCode::kTooShort, "pattern needs at least 2 points, got " + std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      throw Error(ErrorCode::kInvalidArgument, "pattern point " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(points_[i].x > points_[i - 1].x)) {
      throw Error(ErrorCode::kInvalidArgument, "pattern x coordinates must be strictly increasing (point " +
                                                   std::to_string(i) + ")");
    }
  }
}

Pattern Pattern::normalized() const {
  std::vector<double> xs(points_.size());
  std::vector<double> ys(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    xs[i] = points_[i].x;
    ys[i] = points_[i].y;
  }
  xs = normalize_minmax(xs);
  ys = normalize_minmax(ys);
  std::vector<Point> pts(points_.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {xs[i], ys[i]};
  return Pattern(std::move(pts), name_);
}

std::vector<double> Pattern::resample(std::size_t count) const {
  if (count < 2) throw Error(ErrorCode::kInvalidArgument, "resample count must be at least 2");
  const Pattern norm = normalized();
  const auto pts = norm.points();
  std::vector<double> out(count);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(count - 1);
    while (seg + 2 < pts.size() && pts[seg + 1].x < x) ++seg;
    const Point& a = pts[seg];
    const Point& b = pts[seg + 1];
    double t = (x - a.x) / (b.x - a.x);
    t = std::clamp(t, 0.0, 1.0);
    out[j] = std::clamp(a.y + t * (b.y - a.y), 0.0, 1.0);
  }
  return out;
}

PointSet::PointSet(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!(e.p.x >= 0.0 && e.p.x <= 1.0 && e.p.y >= 0.0 && e.p.y <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "point set coordinates must lie in [0,1]");
    }
    if (e.origin) ++origin_count_;
  }
}

std::vector<Point> PointSet::origin_points() const {
  std::vector<Point> out;
  out.reserve(origin_count_);
  for (const auto& e : entries_) {
    if (e.origin) out.push_back(e.p);
  }
  return out;
}

std::vector<double> PointSet::ys() const {
  std::vector<double> out(entries_.size());
  std::transform(entries_.begin(), entries_.end(), out.begin(), [](const Entry& e) { return e.p.y; });
  return out;
}

// ---- CSV ---------------------------------------------------------------------

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    auto fields = split_record(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw Error(ErrorCode::kParse, "CSV is empty (header row required)");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

TimeSeries series_from_csv(const CsvTable& table, std::string_view value_column) {
  const std::size_t col = resolve_column(table, value_column);
  auto values = numeric_column(table, col);
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooShort, "CSV too short: need at least 2 data rows, got " +
                                          std::to_string(values.size()));
  }
  std::vector<std::string> labels;
  for (const char* name : {"date", "time", "timestamp"}) {
    auto it = std::find_if(table.header.begin(), table.header.end(),
                           [&](const std::string& h) { return lower(h) == name; });
    if (it == table.header.end()) continue;
    const auto lc = static_cast<std::size_t>(it - table.header.begin());
    if (lc == col) break;
    for (const auto& row : table.rows) labels.push_back(lc < row.size() ? row[lc] : std::string{});
    break;
  }
  return TimeSeries(std::move(values), std::move(labels));
}

TimeSeries load_csv(const std::filesystem::path& path, std::string_view value_column) {
  return series_from_csv(read_csv_file(path), value_column);
}

Pattern pattern_from_csv(const CsvTable& table, std::string_view value_column, std::string name) {
  const auto xc = table.column("x");
  const auto yc = table.column("y");
  std::vector<Point> pts;
  if (xc && yc && value_column.empty()) {
    const auto xs = numeric_column(table, *xc);
    const auto ys = numeric_column(table, *yc);
    for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({xs[i], ys[i]});
  } else {
    const auto ys = numeric_column(table, resolve_column(table, value_column));
    for (std::size_t i = 0; i < ys.size(); ++i) pts.push_back({static_cast<double>(i), ys[i]});
  }
  if (pts.size() < 2) {
    throw Error(ErrorCode::kTooShort, "pattern CSV too short: need at least 2 rows, got " +
                                          std::to_string(pts.size()));
  }
  return Pattern(std::move(pts), std::move(name));
}

Pattern load_pattern_csv(const std::filesystem::path& path, std::string_view value_column) {
  return pattern_from_csv(read_csv_file(path), value_column, path.stem().string());
}

// ---- normalization / windows ------------------------------------------------

std::vector<double> normalize_minmax(std::span<const double> series) {
  if (series.size() < 2) {
    throw Error(ErrorCode::kTooShort, "normalization needs at least 2 values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(series.size());
  if (!(hi > lo)) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < series.size(); ++i) {
    out[i] = std::clamp((series[i] - lo) / range, 0.0, 1.0);
  }
  // Pin the extremes so they survive rounding exactly.
  out[static_cast<std::size_t>(lo_it - series.begin())] = 0.0;
  out[static_cast<std::size_t>(hi_it - series.begin())] = 1.0;
  return out;
}

std::vector<double> normalize_zscore(std::span<const double> series, double clip) {
  if (series.size() < 2) throw Error(ErrorCode::kTooShort, "normalization needs at least 2 values");
  if (!(clip > 0.0)) throw Error(ErrorCode::kInvalidArgument, "z-score clip must be positive");
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<double> out(series.size(), 0.5);
  if (!(sd > 0.0)) return out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double z = std::clamp((series[i] - mean) / sd, -clip, clip);
    out[i] = (z + clip) / (2.0 * clip);
  }
  return out;
}

PointSet to_pointset(std::span<const double> normalized) {
  if (normalized.size() < 2) throw Error(ErrorCode::kTooShort, "point set needs at least 2 values");
  std::vector<PointSet::Entry> entries(normalized.size());
  const double last = static_cast<double>(normalized.size() - 1);
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    entries[i] = {{static_cast<double>(i) / last, normalized[i]}, true};
  }
  return PointSet(std::move(entries));
}

PointSet to_pointset(const Pattern& pattern) {
  const Pattern norm = pattern.normalized();
  std::vector<PointSet::Entry> entries;
  entries.reserve(norm.size());
  for (const Point& p : norm.points()) entries.push_back({p, true});
  return PointSet(std::move(entries));
}

std::size_t window_count(std::size_t series_length, std::size_t length, std::size_t stride) {
  if (length == 0 || stride == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window length and stride must be positive");
  }
  if (length > series_length) {
    throw Error(ErrorCode::kInvalidArgument, "window length " + std::to_string(length) +
                                                 " exceeds series length " + std::to_string(series_length));
  }
  return (series_length - length) / stride + 1;
}

std::vector<Window> windows(const TimeSeries& series, std::size_t length, std::size_t stride,
                            const Normalizer& normalize) {
  const std::size_t count = window_count(series.size(), length, stride);
  if (length < 2) throw Error(ErrorCode::kInvalidArgument, "window length must be at least 2");
  std::vector<Window> out;
  out.reserve(count);
  const auto values = series.values();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t start = k * stride;
    out.push_back({start, normalize(values.subspan(start, length))});
  }
  return out;
}

TimeSeries smooth_moving_average(const TimeSeries& series, std::size_t window) {
  if (window == 0 || window > series.size()) {
    throw Error(ErrorCode::kInvalidArgument, "moving-average window must be in [1, " +
                                                 std::to_string(series.size()) + "]");
  }
  const auto v = series.values();
  const std::size_t n = v.size();
  // Centered: for even windows the extra sample sits on the left.
  const std::size_t left = window / 2;
  const std::size_t right = window - 1 - left;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n - 1, i + right);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += v[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return TimeSeries(std::move(out), std::vector<std::string>(series.labels().begin(), series.labels().end()));
}

}  // namespace patred
