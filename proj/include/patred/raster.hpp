#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patred/core_data.hpp"

namespace patred {

inline constexpr int kDefaultBins = 16;

/// B x B count grid over the unit square. Cells are row-major with row 0 at
/// the bottom (y in [0, 1/B)); index = row * B + col.
class RasterImage {
 public:
  explicit RasterImage(int b);

  int b() const { return b_; }
  std::size_t cell_count() const { return counts_.size(); }
  std::uint64_t total() const { return total_; }

  std::uint64_t at(int row, int col) const { return counts_[index(row, col)]; }
  std::span<const std::uint64_t> cells() const { return counts_; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(b_) + static_cast<std::size_t>(col);
  }

  /// Bin of a coordinate in [0,1]; 1.0 falls in the last bin.
  int bin_of(double v) const;

  void add(const Point& p);

  bool operator==(const RasterImage&) const = default;

 private:
  int b_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// 2x2 contingency table of paired binary cell occupancy. n<x><y>: n10 counts
/// cells occupied in X but empty in Y.
struct Histogram2x2 {
  std::uint64_t n00 = 0;
  std::uint64_t n01 = 0;
  std::uint64_t n10 = 0;
  std::uint64_t n11 = 0;

  std::uint64_t total() const { return n00 + n01 + n10 + n11; }
  bool operator==(const Histogram2x2&) const = default;
};

RasterImage rasterize(const PointSet& ps, int b = kDefaultBins);

/// Grid side for the "8 square bins per line segment" layout, clipped to [8, 128].
int bins_per_segment(std::size_t series_length);

/// count_i / total over populated cells, in cell-index order.
std::vector<double> marginal_pdf(const RasterImage& img);

/// (count_i + eps on zero cells) renormalized, over all B*B cells.
std::vector<double> smoothed_cell_distribution(const RasterImage& img, double eps);

Histogram2x2 joint_occupancy(const RasterImage& x, const RasterImage& y);

/// Sorted indices of populated cells.
std::vector<std::size_t> occupancy_set(const RasterImage& img);

}  // namespace patred
