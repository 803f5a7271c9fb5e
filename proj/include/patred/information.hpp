#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patred/raster.hpp"

namespace patred {

/// Shannon entropy in bits of a probability vector (sum 1 within 1e-9, p >= 0).
double entropy(std::span<const double> p);

/// Entropy in bits of the empirical distribution of nonnegative counts.
/// Terms are summed in ascending count order, so any permutation of the same
/// counts gives a bit-identical result.
double entropy_of_counts(std::span<const std::uint64_t> counts);

/// Dense r x c table of paired discrete outcomes.
class ContingencyTable {
 public:
  ContingencyTable(std::size_t rows, std::size_t cols);
  explicit ContingencyTable(const Histogram2x2& h);

  /// Table of paired labels; labels must lie in [0, levels).
  static ContingencyTable from_pairs(std::span<const int> xs, std::span<const int> ys, std::size_t x_levels,
                                     std::size_t y_levels);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t at(std::size_t r, std::size_t c) const { return counts_[r * cols_ + c]; }
  void add(std::size_t r, std::size_t c, std::uint64_t n = 1) { counts_[r * cols_ + c] += n; }
  std::uint64_t total() const;

  std::vector<std::uint64_t> row_sums() const;
  std::vector<std::uint64_t> col_sums() const;
  std::span<const std::uint64_t> cells() const { return counts_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> counts_;
};

struct MutualInformation {
  double mi = 0.0;   // I = Hx + Hy - Hxy, clamped at 0
  double hx = 0.0;
  double hy = 0.0;
  double hxy = 0.0;
};

MutualInformation mutual_information(const ContingencyTable& table);
MutualInformation mutual_information(const Histogram2x2& h);

/// I / sqrt(Hx Hy), clamped to [0,1]. Throws kDegenerate when either marginal
/// entropy is zero.
double normalized_mutual_information(const MutualInformation& m);

double nmi_distance(const Histogram2x2& h);

/// Variation of information Hx + Hy - 2I, bits.
double variation_of_information(const MutualInformation& m);
double vi(const Histogram2x2& h);

/// sum p log2(p/q) over p > 0. Throws when q is zero where p is not; smooth
/// first (see smoothed_cell_distribution).
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Jensen-Shannon divergence, log base 2, in [0,1].
double jsd(std::span<const double> p, std::span<const double> q);

}  // namespace patred
