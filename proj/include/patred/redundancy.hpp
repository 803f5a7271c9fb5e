#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "patred/core_data.hpp"

namespace patred {

enum class RedundancyKind {
  kNone,
  kEquidistant,  // N collinear points per segment
  kAreaLine,     // equidistant, replicated with upward vertical shifts
  kCloud,        // equidistant, added points jittered by U[0, eta] on y
  kGaussCloud,   // equidistant, added points jittered by N(0, sd), redrawn into [0,1]
};

std::string_view to_string(RedundancyKind kind);
RedundancyKind parse_redundancy_kind(std::string_view name);

/// Redundant-point counts per segment used by the evaluation sweep.
inline constexpr std::array<int, 17> kSweepPointCounts = {0, 1, 2, 3, 4, 5, 6, 7, 8,
                                                          9, 10, 15, 20, 25, 50, 75, 100};
/// Cloud noise amplitudes used by the evaluation sweep.
inline constexpr std::array<double, 3> kSweepEtas = {0.025, 0.1, 0.2};

struct RedundancyConfig {
  RedundancyKind kind = RedundancyKind::kNone;
  int n_points = 0;      // N per segment
  int copies = 10;       // area-line
  double shift = 0.01;   // area-line vertical step
  double eta = 0.1;      // cloud amplitude
  double sd = 0.1;       // gauss-cloud standard deviation
  std::uint64_t seed = 0;

  /// Throws kInvalidArgument when a field is out of range.
  void validate() const;

  /// True when the output keeps a one-to-one x order usable as a paired
  /// vector (none / equidistant).
  bool is_sequence_compatible() const {
    return kind == RedundancyKind::kNone || kind == RedundancyKind::kEquidistant;
  }

  /// Short label, e.g. "areaLine_10" or "cloud_25_eta0.1".
  std::string label() const;

  bool operator==(const RedundancyConfig&) const = default;
};

/// Inserts n points at t = k/(n+1), k = 1..n, on each segment between adjacent
/// origin points. Output is in x order; origin points are kept verbatim.
PointSet equidistant(const PointSet& ps, int n);

/// equidistant(ps, n) followed by copies-1 replicas shifted up by shift,
/// 2*shift, ...; shifted y is clamped at 1.
PointSet area_line(const PointSet& ps, int n, int copies, double shift);

/// equidistant(ps, n) with every added point moved up by U[0, eta], clamped
/// at 1. Deterministic per seed.
PointSet cloud(const PointSet& ps, int n, double eta, std::uint64_t seed);

PointSet gauss_cloud(const PointSet& ps, int n, double sd, std::uint64_t seed);

/// Dispatches on cfg.kind. `ps` must contain origin points only.
PointSet apply_redundancy(const PointSet& ps, const RedundancyConfig& cfg);

}  // namespace patred
