#include "patred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "patred/error.hpp"
#include "patred/information.hpp"
#include "patred/mid.hpp"

namespace patred {

namespace {

void check_same_length(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": vectors differ in length (" +
                                                 std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": empty vectors");
}

std::size_t intersection_size(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

int quantize(double y, int b) {
  const int bin = static_cast<int>(std::floor(y * b));
  return std::clamp(bin, 0, b - 1);
}

std::vector<int> quantize_all(std::span<const double> ys, int b) {
  std::vector<int> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = quantize(ys[i], b);
  return out;
}

// (index, level) cells of a quantized sequence, as a sorted set.
std::vector<std::size_t> sequence_cells(std::span<const int> levels, int b) {
  std::vector<std::size_t> out(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out[i] = i * static_cast<std::size_t>(b) + static_cast<std::size_t>(levels[i]);
  }
  return out;
}

std::vector<double> smoothed_level_distribution(std::span<const int> levels, int b, double eps) {
  std::vector<double> p(static_cast<std::size_t>(b), 0.0);
  for (int l : levels) p[static_cast<std::size_t>(l)] += 1.0;
  double sum = 0.0;
  for (auto& v : p) {
    v = v > 0.0 ? v / static_cast<double>(levels.size()) : eps;
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> as_doubles(std::span<const std::uint64_t> c) {
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](std::uint64_t v) { return static_cast<double>(v); });
  return out;
}

// NMI-based distances with the degenerate policy applied.
struct NmiOutcome {
  double nmi = 0.0;
  bool degenerate = false;
};

NmiOutcome nmi_with_policy(const MutualInformation& m, DegeneratePolicy policy) {
  try {
    return {normalized_mutual_information(m), false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate || policy == DegeneratePolicy::kThrow) throw;
    return {0.0, true};
  }
}

DistanceValue info_distance(const MutualInformation& m, MetricId metric, Mode mode, DegeneratePolicy policy) {
  const auto o = nmi_with_policy(m, policy);
  DistanceValue d{0.0, metric, mode, o.degenerate};
  d.value = metric == MetricId::kMid ? mid_chord(m.hx, m.hy, o.nmi) : 1.0 - o.nmi;
  return d;
}

}  // namespace

// ---- names & capability ----------------------------------------------------------

std::string_view to_string(MetricId m) {
  switch (m) {
    case MetricId::kManhattan: return "manhattan";
    case MetricId::kEuclidean: return "euclidean";
    case MetricId::kCosine: return "cosine";
    case MetricId::kJaccard: return "jaccard";
    case MetricId::kDice: return "dice";
    case MetricId::kPearson: return "pearson";
    case MetricId::kNmi: return "nmi";
    case MetricId::kJsd: return "jsd";
    case MetricId::kMid: return "mid";
  }
  return "nmi";
}

std::string_view to_string(Mode m) { return m == Mode::kSequence ? "sequence" : "raster"; }

MetricId parse_metric(std::string_view name) {
  const std::string s = lower_alnum(name);
  for (MetricId m : kAllMetrics) {
    if (s == to_string(m)) return m;
  }
  if (s == "man" || s == "l1") return MetricId::kManhattan;
  if (s == "euc" || s == "l2") return MetricId::kEuclidean;
  if (s == "mi" || s == "mutualinformation") return MetricId::kNmi;
  if (s == "midnd") return MetricId::kMid;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown metric '" + std::string(name) +
                  "' (expected manhattan, euclidean, cosine, jaccard, dice, pearson, nmi, jsd or mid)");
}

Mode parse_mode(std::string_view name) {
  const std::string s = lower_alnum(name);
  if (s == "sequence" || s == "seq") return Mode::kSequence;
  if (s == "raster" || s == "image") return Mode::kRaster;
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "' (expected sequence or raster)");
}

bool supports(MetricId metric, Mode mode) {
  switch (metric) {
    case MetricId::kManhattan:
    case MetricId::kEuclidean:
    case MetricId::kPearson: return mode == Mode::kSequence;
    default: return true;
  }
}

Mode canonical_mode(MetricId metric) { return supports(metric, Mode::kRaster) ? Mode::kRaster : Mode::kSequence; }

void check_capability(MetricId metric, Mode mode, const RedundancyConfig& cfg) {
  if (!supports(metric, mode)) {
    throw Error(ErrorCode::kCapability,
                std::string(to_string(metric)) + " works only on paired vectors (sequence mode), not on raster images");
  }
  if (mode == Mode::kSequence && !cfg.is_sequence_compatible()) {
    throw Error(ErrorCode::kCapability,
                std::string(to_string(metric)) + " cannot be combined with " + std::string(to_string(cfg.kind)) +
                    " redundancy: sequence metrics need vectors with the same number of points paired in a fixed "
                    "order, and " +
                    std::string(to_string(cfg.kind)) + " produces binned point areas without that pairing");
  }
}

// ---- primitive metrics ---------------------------------------------------------

double manhattan(std::span<const double> x, std::span<const double> y) {
  check_same_length(x, y, "manhattan");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(x[i] - y[i]);
  return d;
}

double euclidean(std::span<const double> x, std::span<const double> y) {
  check_same_length(x, y, "euclidean");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(d);
}

double cosine_distance(std::span<const double> x, std::span<const double> y) {
  check_same_length(x, y, "cosine");
  double dot = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (!(xx > 0.0) || !(yy > 0.0)) throw Error(ErrorCode::kDegenerate, "cosine distance of a zero vector");
  return std::clamp(1.0 - dot / (std::sqrt(xx) * std::sqrt(yy)), 0.0, 1.0);
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_same_length(x, y, "pearson");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "pearson correlation undefined: zero variance");
  }
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

double pearson_distance(std::span<const double> x, std::span<const double> y) {
  return (1.0 - pearson_r(x, y)) / 2.0;
}

double jaccard_distance(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty() && b.empty()) return 0.0;
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double dice_distance(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty() && b.empty()) return 0.0;
  const std::size_t inter = intersection_size(a, b);
  return 1.0 - 2.0 * static_cast<double>(inter) / static_cast<double>(a.size() + b.size());
}

// ---- redundancy-aware comparison ------------------------------------------------

ChartRepresentation represent(const PointSet& origin, const RedundancyConfig& cfg, int b, bool want_sequence,
                              bool want_raster) {
  const PointSet augmented = apply_redundancy(origin, cfg);
  ChartRepresentation r;
  if (want_sequence && cfg.is_sequence_compatible()) r.sequence = augmented.ys();
  if (want_raster) r.raster = rasterize(augmented, b);
  return r;
}

DistanceValue compare(const ChartRepresentation& x, const ChartRepresentation& y, MetricId metric, Mode mode,
                      const DistanceOptions& opts) {
  const bool tolerate = opts.degenerate == DegeneratePolicy::kIndependent;
  DistanceValue out{0.0, metric, mode, false};

  if (mode == Mode::kSequence) {
    if (x.sequence.empty() || y.sequence.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "sequence representation missing");
    }
    if (x.sequence.size() != y.sequence.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sequence mode needs equal lengths (" + std::to_string(x.sequence.size()) + " vs " +
                      std::to_string(y.sequence.size()) + ")");
    }
    const auto& xs = x.sequence;
    const auto& ys = y.sequence;
    switch (metric) {
      case MetricId::kManhattan: out.value = manhattan(xs, ys); return out;
      case MetricId::kEuclidean: out.value = euclidean(xs, ys); return out;
      case MetricId::kPearson:
        try {
          out.value = pearson_distance(xs, ys);
        } catch (const Error& e) {
          if (!tolerate || e.code() != ErrorCode::kDegenerate) throw;
          out.value = 0.5;
          out.degenerate = true;
        }
        return out;
      case MetricId::kCosine:
        try {
          out.value = cosine_distance(xs, ys);
        } catch (const Error& e) {
          if (!tolerate || e.code() != ErrorCode::kDegenerate) throw;
          out.value = 1.0;
          out.degenerate = true;
        }
        return out;
      default: break;
    }
    const auto lx = quantize_all(xs, opts.b);
    const auto ly = quantize_all(ys, opts.b);
    switch (metric) {
      case MetricId::kJaccard:
        out.value = jaccard_distance(sequence_cells(lx, opts.b), sequence_cells(ly, opts.b));
        return out;
      case MetricId::kDice:
        out.value = dice_distance(sequence_cells(lx, opts.b), sequence_cells(ly, opts.b));
        return out;
      case MetricId::kJsd:
        out.value = jsd(smoothed_level_distribution(lx, opts.b, opts.smoothing),
                        smoothed_level_distribution(ly, opts.b, opts.smoothing));
        return out;
      default: {
        const auto levels = static_cast<std::size_t>(opts.b);
        const auto m = mutual_information(ContingencyTable::from_pairs(lx, ly, levels, levels));
        return info_distance(m, metric, mode, opts.degenerate);
      }
    }
  }

  if (!x.raster || !y.raster) throw Error(ErrorCode::kInvalidArgument, "raster representation missing");
  const RasterImage& rx = *x.raster;
  const RasterImage& ry = *y.raster;
  if (rx.b() != ry.b()) throw Error(ErrorCode::kInvalidArgument, "raster size mismatch");
  switch (metric) {
    case MetricId::kCosine:
      try {
        out.value = cosine_distance(as_doubles(rx.cells()), as_doubles(ry.cells()));
      } catch (const Error& e) {
        if (!tolerate || e.code() != ErrorCode::kDegenerate) throw;
        out.value = 1.0;
        out.degenerate = true;
      }
      return out;
    case MetricId::kJaccard: out.value = jaccard_distance(occupancy_set(rx), occupancy_set(ry)); return out;
    case MetricId::kDice: out.value = dice_distance(occupancy_set(rx), occupancy_set(ry)); return out;
    case MetricId::kJsd:
      out.value = jsd(smoothed_cell_distribution(rx, opts.smoothing), smoothed_cell_distribution(ry, opts.smoothing));
      return out;
    case MetricId::kNmi:
    case MetricId::kMid: return info_distance(mutual_information(joint_occupancy(rx, ry)), metric, mode, opts.degenerate);
    default: break;
  }
  throw Error(ErrorCode::kCapability, std::string(to_string(metric)) + " has no raster form");
}

DistanceValue distance(const PointSet& x, const PointSet& y, MetricId metric, const RedundancyConfig& cfg,
                       const DistanceOptions& opts) {
  const Mode mode = opts.mode.value_or(canonical_mode(metric));
  check_capability(metric, mode, cfg);
  cfg.validate();
  if (mode == Mode::kSequence && x.origin_count() != y.origin_count()) {
    throw Error(ErrorCode::kInvalidArgument, "sequence mode needs equal origin lengths (" +
                                                 std::to_string(x.origin_count()) + " vs " +
                                                 std::to_string(y.origin_count()) + ")");
  }
  const bool seq = mode == Mode::kSequence;
  const auto rx = represent(x, cfg, opts.b, seq, !seq);
  const auto ry = represent(y, cfg, opts.b, seq, !seq);
  return compare(rx, ry, metric, mode, opts);
}

}  // namespace patred
