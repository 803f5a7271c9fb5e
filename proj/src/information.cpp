#include "patred/information.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patred/error.hpp"

namespace patred {

namespace {

void check_distribution(std::span<const double> p, const char* what) {
  if (p.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": empty distribution");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": probabilities must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": probabilities must sum to 1");
  }
}

}  // namespace

double entropy(std::span<const double> p) {
  check_distribution(p, "entropy");
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return std::max(h, 0.0);
}

double entropy_of_counts(std::span<const std::uint64_t> counts) {
  std::vector<std::uint64_t> sorted;
  sorted.reserve(counts.size());
  for (auto c : counts) {
    if (c > 0) sorted.push_back(c);
  }
  if (sorted.empty()) throw Error(ErrorCode::kInvalidArgument, "entropy of an all-zero count vector");
  std::sort(sorted.begin(), sorted.end());
  const double total = static_cast<double>(std::accumulate(sorted.begin(), sorted.end(), std::uint64_t{0}));
  double h = 0.0;
  for (auto c : sorted) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

// ---- contingency tables -----------------------------------------------------

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::kInvalidArgument, "contingency table must be non-empty");
  counts_.assign(rows * cols, 0);
}

ContingencyTable::ContingencyTable(const Histogram2x2& h) : ContingencyTable(2, 2) {
  counts_ = {h.n00, h.n01, h.n10, h.n11};
}

ContingencyTable ContingencyTable::from_pairs(std::span<const int> xs, std::span<const int> ys,
                                              std::size_t x_levels, std::size_t y_levels) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kInvalidArgument, "paired sequences differ in length");
  }
  ContingencyTable t(x_levels, y_levels);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 0 || ys[i] < 0 || static_cast<std::size_t>(xs[i]) >= x_levels ||
        static_cast<std::size_t>(ys[i]) >= y_levels) {
      throw Error(ErrorCode::kInvalidArgument, "label outside the table range");
    }
    t.add(static_cast<std::size_t>(xs[i]), static_cast<std::size_t>(ys[i]));
  }
  return t;
}

std::uint64_t ContingencyTable::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::vector<std::uint64_t> ContingencyTable::row_sums() const {
  std::vector<std::uint64_t> out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out[r] += at(r, c);
  }
  return out;
}

std::vector<std::uint64_t> ContingencyTable::col_sums() const {
  std::vector<std::uint64_t> out(cols_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out[c] += at(r, c);
  }
  return out;
}

MutualInformation mutual_information(const ContingencyTable& table) {
  if (table.total() == 0) throw Error(ErrorCode::kInvalidArgument, "mutual information of an empty table");
  MutualInformation m;
  const auto rs = table.row_sums();
  const auto cs = table.col_sums();
  m.hx = entropy_of_counts(rs);
  m.hy = entropy_of_counts(cs);
  m.hxy = entropy_of_counts(table.cells());
  m.mi = std::max(0.0, m.hx + m.hy - m.hxy);
  return m;
}

MutualInformation mutual_information(const Histogram2x2& h) {
  return mutual_information(ContingencyTable(h));
}

double normalized_mutual_information(const MutualInformation& m) {
  if (!(m.hx > 0.0) || !(m.hy > 0.0)) {
    throw Error(ErrorCode::kDegenerate,
                "NMI undefined: a marginal entropy is zero (grid fully empty or fully occupied)");
  }
  return std::clamp(m.mi / std::sqrt(m.hx * m.hy), 0.0, 1.0);
}

double nmi_distance(const Histogram2x2& h) {
  return 1.0 - normalized_mutual_information(mutual_information(h));
}

double variation_of_information(const MutualInformation& m) {
  return std::max(0.0, m.hx + m.hy - 2.0 * m.mi);
}

double vi(const Histogram2x2& h) { return variation_of_information(mutual_information(h)); }

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kInvalidArgument, "KL: distributions differ in length");
  check_distribution(p, "KL");
  check_distribution(q, "KL");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "KL: q is zero where p is positive; smooth the inputs");
    }
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kInvalidArgument, "JSD: distributions differ in length");
  check_distribution(p, "JSD");
  check_distribution(q, "JSD");
  // Each term is accumulated symmetrically in (p, q) so jsd(p,q) == jsd(q,p) exactly.
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    double term_p = p[i] > 0.0 ? p[i] * std::log2(p[i] / m) : 0.0;
    double term_q = q[i] > 0.0 ? q[i] * std::log2(q[i] / m) : 0.0;
    d += 0.5 * (term_p + term_q);
  }
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace patred
