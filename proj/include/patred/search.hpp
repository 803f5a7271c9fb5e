#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "patred/core_data.hpp"
#include "patred/metrics.hpp"
#include "patred/mid.hpp"
#include "patred/redundancy.hpp"

namespace patred {

enum class WindowNormalization { kMinMax, kZScore };

struct SearchRequest {
  Pattern pattern;
  TimeSeries series;
  MetricId metric = MetricId::kNmi;
  RedundancyConfig redundancy{RedundancyKind::kEquidistant, 100};
  int b = kDefaultBins;
  bool bins_per_segment = false;         // overrides b with 8 * (window - 1), clipped to [8, 128]
  std::optional<Mode> mode{};            // canonical for the metric when unset
  std::optional<std::size_t> window{};   // defaults to the pattern's point count
  std::size_t stride = 1;
  std::size_t top_k = 9;
  std::optional<std::size_t> exclusion{};  // defaults to the window length
  WindowNormalization normalization = WindowNormalization::kMinMax;

  std::size_t window_length() const { return window.value_or(pattern.size()); }
  std::size_t exclusion_gap() const { return exclusion.value_or(window_length()); }
  int grid_side() const;
  Mode resolved_mode() const { return mode.value_or(canonical_mode(metric)); }

  /// Throws on invalid fields (including window longer than the series) and
  /// on metric/redundancy capability violations.
  void validate() const;
};

struct MatchResult {
  std::size_t start_index = 0;
  double distance = 0.0;
  std::size_t rank = 0;
  std::vector<double> window;  // normalized values
  bool degenerate = false;
};

/// Ordinal ranks (1-based) by ascending distance; ties go to the lower index.
std::vector<std::size_t> rank_windows(std::span<const double> distances);

/// Windows x grid cells for raster searches, windows x window length for
/// sequence searches. Used for request size caps.
std::size_t search_cost(const SearchRequest& req);

/// Pattern after resampling to the window length, as normalized y values.
std::vector<double> search_reference(const SearchRequest& req);

/// Scores every window, suppresses matches closer than the exclusion gap, and
/// returns up to top_k results sorted by (distance, start).
std::vector<MatchResult> search(const SearchRequest& req);

/// MID coordinates of the reference (first, labeled P_o) and each match, on
/// the request's raster. Degenerate comparisons are placed at NMI = 0.
std::vector<MidPoint> match_mid_points(const SearchRequest& req, std::span<const MatchResult> matches);

}  // namespace patred
