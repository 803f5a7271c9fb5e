#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patred {

/// Ordered observations, e.g. daily traded volume. At least two finite values;
/// labels (dates) are optional and, when present, parallel to values.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values,
                      std::vector<std::string> labels = {});

  std::span<const double> values() const { return values_; }
  std::span<const std::string> labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Exemplar shape, e.g. a digitized sketch. x strictly increasing.
class Pattern {
 public:
  Pattern(std::vector<Point> points, std::string name = {});

  std::span<const Point> points() const { return points_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return points_.size(); }

  /// Both axes min-max scaled into [0,1].
  Pattern normalized() const;

  /// Linear interpolation at `count` uniform x positions over the normalized
  /// x range; returns the y values (in [0,1]).
  std::vector<double> resample(std::size_t count) const;

 private:
  std::vector<Point> points_;
  std::string name_;
};

/// Point cloud in the unit square. Points flagged `origin` came from the
/// un-augmented source; origin points keep their x order.
class PointSet {
 public:
  struct Entry {
    Point p;
    bool origin = false;
  };

  PointSet() = default;
  explicit PointSet(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t origin_count() const { return origin_count_; }

  std::vector<Point> origin_points() const;
  std::vector<double> ys() const;

 private:
  std::vector<Entry> entries_;
  std::size_t origin_count_ = 0;
};

// ---- CSV ingestion ---------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Reads `value_column` as a TimeSeries. An empty column name selects the
/// last header column. A column named date/time/timestamp, when present,
/// becomes the labels.
TimeSeries series_from_csv(const CsvTable& table, std::string_view value_column);
TimeSeries load_csv(const std::filesystem::path& path, std::string_view value_column);

/// Pattern from a CSV with x,y columns, or from a single value column (x = row
/// index) when x/y are absent.
Pattern pattern_from_csv(const CsvTable& table, std::string_view value_column,
                         std::string name = {});
Pattern load_pattern_csv(const std::filesystem::path& path, std::string_view value_column);

// ---- normalization & windowing --------------------------------------------

using Normalizer = std::function<std::vector<double>(std::span<const double>)>;

/// Affine map of [min,max] onto [0,1]; a constant input maps to all 0.5.
std::vector<double> normalize_minmax(std::span<const double> series);

/// Alternative window normalizer: z-scores clipped to [-clip, clip] and mapped
/// linearly onto [0,1]. Constant input maps to all 0.5.
std::vector<double> normalize_zscore(std::span<const double> series, double clip = 3.0);

PointSet to_pointset(std::span<const double> normalized);
PointSet to_pointset(const Pattern& pattern);

struct Window {
  std::size_t start = 0;
  std::vector<double> values;  // normalized
};

std::vector<Window> windows(const TimeSeries& series, std::size_t length, std::size_t stride,
                            const Normalizer& normalize = normalize_minmax);

/// Number of windows `windows` would produce, without building them.
std::size_t window_count(std::size_t series_length, std::size_t length, std::size_t stride);

/// Centered moving average; the window is truncated at the edges.
TimeSeries smooth_moving_average(const TimeSeries& series, std::size_t window);

}  // namespace patred
