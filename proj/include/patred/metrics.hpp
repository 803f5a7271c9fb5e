#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "patred/core_data.hpp"
#include "patred/raster.hpp"
#include "patred/redundancy.hpp"

namespace patred {

enum class MetricId { kManhattan, kEuclidean, kCosine, kJaccard, kDice, kPearson, kNmi, kJsd, kMid };

inline constexpr std::array<MetricId, 9> kAllMetrics = {
    MetricId::kManhattan, MetricId::kEuclidean, MetricId::kCosine, MetricId::kJaccard, MetricId::kDice,
    MetricId::kPearson,   MetricId::kNmi,       MetricId::kJsd,    MetricId::kMid};

/// Sequence: paired 1-D vectors. Raster: binned B x B images.
enum class Mode { kSequence, kRaster };

std::string_view to_string(MetricId m);
std::string_view to_string(Mode m);
MetricId parse_metric(std::string_view name);
Mode parse_mode(std::string_view name);

bool supports(MetricId metric, Mode mode);
Mode canonical_mode(MetricId metric);

/// Throws ErrorCode::kCapability when the metric cannot run in `mode`, or when
/// a sequence-mode comparison is asked to use redundancy that breaks the
/// one-to-one pairing of points (area-line, cloud).
void check_capability(MetricId metric, Mode mode, const RedundancyConfig& cfg);

struct DistanceValue {
  double value = 0.0;
  MetricId metric = MetricId::kNmi;
  Mode mode = Mode::kRaster;
  bool degenerate = false;  // undefined comparison replaced by its "independent" value
};

// ---- primitive metrics ------------------------------------------------------

double manhattan(std::span<const double> x, std::span<const double> y);
double euclidean(std::span<const double> x, std::span<const double> y);
double cosine_distance(std::span<const double> x, std::span<const double> y);
/// (1 - r) / 2.
double pearson_distance(std::span<const double> x, std::span<const double> y);
double pearson_r(std::span<const double> x, std::span<const double> y);

/// Sets are sorted, duplicate-free index vectors. Two empty sets are identical.
double jaccard_distance(std::span<const std::size_t> a, std::span<const std::size_t> b);
double dice_distance(std::span<const std::size_t> a, std::span<const std::size_t> b);

// ---- redundancy-aware comparison ---------------------------------------------

enum class DegeneratePolicy {
  kThrow,        // surface ErrorCode::kDegenerate
  kIndependent,  // treat as uncorrelated: r = 0, cosine similarity 0, NMI 0
};

inline constexpr double kSmoothingEpsilon = 1e-12;

struct DistanceOptions {
  int b = kDefaultBins;
  std::optional<Mode> mode;  // defaults to canonical_mode(metric)
  double smoothing = kSmoothingEpsilon;
  DegeneratePolicy degenerate = DegeneratePolicy::kThrow;
};

/// A chart after redundancy, in whichever representations were requested.
struct ChartRepresentation {
  std::vector<double> sequence;  // y in x order; empty unless sequence-compatible
  std::optional<RasterImage> raster;
};

ChartRepresentation represent(const PointSet& origin, const RedundancyConfig& cfg, int b, bool want_sequence,
                              bool want_raster);

/// Compares two prepared charts; both must carry the representation `mode`
/// needs. Capability is not re-checked here.
DistanceValue compare(const ChartRepresentation& x, const ChartRepresentation& y, MetricId metric, Mode mode,
                      const DistanceOptions& opts = {});

/// Applies `cfg` to both point sets identically (same seed), then compares.
DistanceValue distance(const PointSet& x, const PointSet& y, MetricId metric, const RedundancyConfig& cfg,
                       const DistanceOptions& opts = {});

}  // namespace patred
