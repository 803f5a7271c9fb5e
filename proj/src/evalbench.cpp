#include "patred/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "patred/error.hpp"
#include "patred/format.hpp"
#include "patred/information.hpp"
#include "patred/mid.hpp"
#include "patred/rng.hpp"

namespace patred {

namespace {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

// Population standard deviation.
MeanSd mean_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

std::pair<std::size_t, std::size_t> two_distinct(Rng& rng, std::size_t n) {
  const std::size_t i = rng.below(n);
  std::size_t j = rng.below(n - 1);
  if (j >= i) ++j;
  return {i, j};
}

std::string canon(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

auto config_key(const RedundancyConfig& c) {
  return std::make_tuple(static_cast<int>(c.kind), c.n_points, c.eta, c.sd, c.copies, c.shift);
}

}  // namespace

// ---- perturbations ---------------------------------------------------------------------

std::string_view to_string(PerturbationId p) {
  switch (p) {
    case PerturbationId::kInterchange2: return "interchange2";
    case PerturbationId::kTwoOutliers: return "twoOutliers";
    case PerturbationId::kOutlierBegin: return "outlierBegin";
    case PerturbationId::kOutlierMiddle: return "outlierMiddle";
    case PerturbationId::kShift2: return "shift2";
    case PerturbationId::kUniformNoise: return "uniformNoise";
    case PerturbationId::kStraightLine: return "straightLine";
    case PerturbationId::kZigzag: return "zigzag";
    case PerturbationId::kRandomNoise: return "randomNoise";
  }
  return "interchange2";
}

PerturbationId parse_perturbation(std::string_view name) {
  const std::string s = canon(name);
  for (PerturbationId p : kAllPerturbations) {
    if (s == canon(to_string(p))) return p;
  }
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    const auto idx = std::stoul(s);
    if (idx < kPerturbationCount) return kAllPerturbations[idx];
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown perturbation '" + std::string(name) + "'");
}

bool is_benchmark(PerturbationId p) {
  return p == PerturbationId::kStraightLine || p == PerturbationId::kZigzag || p == PerturbationId::kRandomNoise;
}

TimeSeries perturb(const TimeSeries& normalized, PerturbationId which, std::uint64_t seed,
                   const PerturbOptions& opts) {
  const std::size_t n = normalized.size();
  if (n < 4) {
    throw Error(ErrorCode::kTooShort, "perturbation needs a series of at least 4 values, got " + std::to_string(n));
  }
  std::vector<double> v(normalized.values().begin(), normalized.values().end());
  Rng rng(seed);
  const MeanSd stats = mean_sd(v);
  const double outlier = stats.mean + opts.outlier_sd * stats.sd;

  switch (which) {
    case PerturbationId::kInterchange2: {
      const auto [i, j] = two_distinct(rng, n);
      std::swap(v[i], v[j]);
      break;
    }
    case PerturbationId::kTwoOutliers: {
      const auto [i, j] = two_distinct(rng, n);
      v[i] = outlier;
      v[j] = outlier;
      break;
    }
    case PerturbationId::kOutlierBegin: v[0] = outlier; break;
    case PerturbationId::kOutlierMiddle: v[n / 2] = outlier; break;
    case PerturbationId::kShift2: std::rotate(v.begin(), v.end() - 2, v.end()); break;
    case PerturbationId::kUniformNoise:
      for (auto& x : v) x = std::clamp(x + opts.noise_scale * rng.uniform(-1.0, 1.0), 0.0, 1.0);
      break;
    case PerturbationId::kStraightLine: std::fill(v.begin(), v.end(), stats.mean); break;
    case PerturbationId::kZigzag:
      for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i % 2);
      break;
    case PerturbationId::kRandomNoise:
      for (auto& x : v) x = rng.uniform();
      break;
  }
  return TimeSeries(std::move(v),
                    std::vector<std::string>(normalized.labels().begin(), normalized.labels().end()));
}

// ---- grid ---------------------------------------------------------------------------------

std::vector<GridChart> build_grid(const TimeSeries& source, std::span<const std::size_t> lengths,
                                  std::size_t selections, std::uint64_t seed) {
  if (selections == 0 || lengths.empty()) throw Error(ErrorCode::kInvalidArgument, "empty evaluation grid");
  Rng rng(seed);
  std::vector<GridChart> out;
  for (std::size_t len : lengths) {
    if (len < 4) throw Error(ErrorCode::kInvalidArgument, "grid lengths must be >= 4");
    if (len > source.size()) {
      throw Error(ErrorCode::kTooShort, "source series of " + std::to_string(source.size()) +
                                            " values is shorter than grid length " + std::to_string(len));
    }
    for (std::size_t s = 0; s < selections; ++s) {
      const std::size_t start = rng.below(source.size() - len + 1);
      const auto slice = source.values().subspan(start, len);
      out.push_back({out.size(), start, std::vector<double>(slice.begin(), slice.end())});
    }
  }
  return out;
}

// ---- agreement -------------------------------------------------------------------------------

std::vector<double> scale_1_9(std::span<const double> distances) {
  if (distances.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to scale");
  const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
  std::vector<double> out(distances.size(), 5.0);
  if (!(*hi > *lo)) return out;
  for (std::size_t i = 0; i < distances.size(); ++i) out[i] = 1.0 + 8.0 * (distances[i] - *lo) / (*hi - *lo);
  return out;
}

std::vector<std::size_t> ordinal_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> ranks(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
  return ranks;
}

double r_squared(std::span<const double> method_scores, std::span<const double> truth) {
  if (method_scores.size() != truth.size() || method_scores.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "r_squared needs two equal-length vectors of at least 2 values");
  }
  const double n = static_cast<double>(truth.size());
  const double mx = std::accumulate(method_scores.begin(), method_scores.end(), 0.0) / n;
  const double my = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double dx = method_scores[i] - mx;
    const double dy = truth[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  // For simple OLS with intercept, R^2 equals the squared correlation.
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r * r, 0.0, 1.0);
}

double f1_rank1(std::span<const std::vector<std::size_t>> method_ranks,
                std::span<const std::vector<std::size_t>> truth_ranks) {
  if (method_ranks.size() != truth_ranks.size()) {
    throw Error(ErrorCode::kInvalidArgument, "f1: dataset counts differ");
  }
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t d = 0; d < method_ranks.size(); ++d) {
    if (method_ranks[d].size() != truth_ranks[d].size()) {
      throw Error(ErrorCode::kInvalidArgument, "f1: candidate counts differ");
    }
    for (std::size_t i = 0; i < method_ranks[d].size(); ++i) {
      const bool pred = method_ranks[d][i] == 1;
      const bool actual = truth_ranks[d][i] == 1;
      if (pred && actual) ++tp;
      else if (pred) ++fp;
      else if (actual) ++fn;
    }
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

double sequence_nmi(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sequence_nmi needs two equal-length non-empty sequences");
  }
  std::map<std::size_t, int> la;
  std::map<std::size_t, int> lb;
  for (auto v : a) la.emplace(v, 0);
  for (auto v : b) lb.emplace(v, 0);
  int k = 0;
  for (auto& [v, idx] : la) idx = k++;
  k = 0;
  for (auto& [v, idx] : lb) idx = k++;
  std::vector<int> xa(a.size());
  std::vector<int> xb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    xa[i] = la[a[i]];
    xb[i] = lb[b[i]];
  }
  const auto m = mutual_information(ContingencyTable::from_pairs(xa, xb, la.size(), lb.size()));
  if (!(m.hx > 0.0) || !(m.hy > 0.0)) {
    return (la.size() == 1 && lb.size() == 1 && a[0] == b[0]) ? 1.0 : 0.0;
  }
  return normalized_mutual_information(m);
}

double mean_sequence_nmi(std::span<const std::vector<std::size_t>> method_ranks,
                         std::span<const std::vector<std::size_t>> truth_ranks) {
  if (method_ranks.size() != truth_ranks.size() || method_ranks.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sequence NMI: dataset counts differ");
  }
  double sum = 0.0;
  for (std::size_t d = 0; d < method_ranks.size(); ++d) sum += sequence_nmi(method_ranks[d], truth_ranks[d]);
  return sum / static_cast<double>(method_ranks.size());
}

// ---- ground truth ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> GroundTruth::ordinal() const {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(mean_rank.size());
  for (const auto& row : mean_rank) out.push_back(ordinal_ranks(row));
  return out;
}

GroundTruth parse_ground_truth(const CsvTable& table, std::size_t datasets) {
  const auto dc = table.column("dataset_id");
  const auto pc = table.column("perturbation_id");
  const auto mc = table.column("mean_rank");
  if (!dc || !pc || !mc) {
    throw Error(ErrorCode::kMissingColumn, "ground truth needs columns dataset_id, perturbation_id, mean_rank");
  }
  GroundTruth truth;
  truth.mean_rank.assign(datasets, {});
  std::vector<std::array<bool, kPerturbationCount>> seen(datasets, std::array<bool, kPerturbationCount>{});
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "ground truth line " + std::to_string(r + 2);
    if (row.size() <= std::max({*dc, *pc, *mc})) throw Error(ErrorCode::kParse, where + ": missing fields");
    std::size_t d = 0;
    double rank = 0.0;
    {
      const auto& s = row[*dc];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
      if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error(ErrorCode::kParse, where + ": dataset_id '" + s + "' is not an integer");
      }
    }
    {
      const auto& s = row[*mc];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), rank);
      if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(rank)) {
        throw Error(ErrorCode::kParse, where + ": mean_rank '" + s + "' is not a real");
      }
    }
    if (d >= datasets) throw Error(ErrorCode::kInvalidArgument, where + ": dataset_id out of range");
    if (rank < 1.0 || rank > 9.0) throw Error(ErrorCode::kInvalidArgument, where + ": mean_rank outside [1,9]");
    const auto p = static_cast<std::size_t>(parse_perturbation(row[*pc]));
    if (seen[d][p]) throw Error(ErrorCode::kInvalidArgument, where + ": duplicate entry");
    seen[d][p] = true;
    truth.mean_rank[d][p] = rank;
  }
  for (std::size_t d = 0; d < datasets; ++d) {
    for (std::size_t p = 0; p < kPerturbationCount; ++p) {
      if (!seen[d][p]) {
        throw Error(ErrorCode::kInvalidArgument, "ground truth missing dataset " + std::to_string(d) + ", " +
                                                     std::string(to_string(kAllPerturbations[p])));
      }
    }
  }
  return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path, std::size_t datasets) {
  return parse_ground_truth(read_csv_file(path), datasets);
}

std::string ground_truth_csv(const GroundTruth& truth) {
  std::ostringstream os;
  os << "dataset_id,perturbation_id,mean_rank\n";
  for (std::size_t d = 0; d < truth.mean_rank.size(); ++d) {
    for (std::size_t p = 0; p < kPerturbationCount; ++p) {
      os << d << ',' << to_string(kAllPerturbations[p]) << ',' << format_real(truth.mean_rank[d][p]) << '\n';
    }
  }
  return os.str();
}

// ---- sweep ---------------------------------------------------------------------------------------

std::vector<RedundancyConfig> default_sweep_configs(std::uint64_t seed) {
  std::vector<RedundancyConfig> out;
  for (int n : kSweepPointCounts) {
    RedundancyConfig c;
    c.kind = RedundancyKind::kEquidistant;
    c.n_points = n;
    c.seed = seed;
    out.push_back(c);
  }
  for (int n : kSweepPointCounts) {
    RedundancyConfig c;
    c.kind = RedundancyKind::kAreaLine;
    c.n_points = n;
    c.seed = seed;
    out.push_back(c);
  }
  for (int n : kSweepPointCounts) {
    for (double eta : kSweepEtas) {
      RedundancyConfig c;
      c.kind = RedundancyKind::kCloud;
      c.n_points = n;
      c.eta = eta;
      c.seed = seed;
      out.push_back(c);
    }
  }
  return out;
}

std::string SweepCombo::label() const { return std::string(to_string(metric)) + "_" + config.label(); }

std::vector<std::vector<std::size_t>> SweepCombo::ranks_by_dataset() const {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& c : cells) {
    if (c.dataset >= out.size()) out.resize(c.dataset + 1);
    out[c.dataset].push_back(c.rank);
  }
  return out;
}

std::vector<double> SweepCombo::scores() const {
  std::vector<double> out(cells.size());
  std::transform(cells.begin(), cells.end(), out.begin(), [](const SweepCell& c) { return c.score; });
  return out;
}

const SweepCombo* SweepResult::find(MetricId metric, const RedundancyConfig& cfg) const {
  for (const auto& c : combos) {
    if (c.metric == metric && config_key(c.config) == config_key(cfg)) return &c;
  }
  return nullptr;
}

CandidateGenerator perturbation_candidates(const PerturbOptions& opts) {
  return [opts](const TimeSeries& original, std::size_t, std::uint64_t seed) {
    std::vector<TimeSeries> out;
    out.reserve(kPerturbationCount);
    for (std::size_t p = 0; p < kPerturbationCount; ++p) {
      out.push_back(perturb(original, kAllPerturbations[p], mix_seed(seed, p), opts));
    }
    return out;
  };
}

CandidateGenerator outlier_magnitude_family() {
  return [](const TimeSeries& original, std::size_t, std::uint64_t seed) {
    std::vector<TimeSeries> out;
    out.reserve(kPerturbationCount);
    for (std::size_t k = 1; k <= kPerturbationCount; ++k) {
      PerturbOptions opts;
      opts.outlier_sd = static_cast<double>(k);
      out.push_back(perturb(original, PerturbationId::kOutlierMiddle, seed, opts));
    }
    return out;
  };
}

SweepResult run_sweep(const std::vector<GridChart>& grid, const SweepConfig& cfg, const CandidateGenerator& gen,
                      const GroundTruth* truth) {
  auto configs = cfg.configs.empty() ? default_sweep_configs(cfg.seed) : cfg.configs;
  std::stable_sort(configs.begin(), configs.end(),
                   [](const RedundancyConfig& a, const RedundancyConfig& b) { return config_key(a) < config_key(b); });
  for (const auto& c : configs) c.validate();

  // Origin point sets: [dataset] -> original, [dataset][candidate] -> candidates.
  std::vector<PointSet> originals;
  std::vector<std::vector<PointSet>> candidates;
  for (const auto& chart : grid) {
    const TimeSeries orig(normalize_minmax(chart.values));
    auto cands = gen(orig, chart.id, mix_seed(cfg.seed, chart.id));
    if (cands.size() != kPerturbationCount) {
      throw Error(ErrorCode::kInvalidArgument, "candidate generator must return 9 series");
    }
    originals.push_back(to_pointset(orig.values()));
    std::vector<PointSet> cps;
    for (const auto& c : cands) cps.push_back(to_pointset(normalize_minmax(c.values())));
    candidates.push_back(std::move(cps));
  }

  DistanceOptions opts;
  opts.b = cfg.b;
  opts.degenerate = DegeneratePolicy::kIndependent;

  // combos[metric][config]
  std::vector<std::vector<std::optional<SweepCombo>>> table(cfg.metrics.size(),
                                                            std::vector<std::optional<SweepCombo>>(configs.size()));
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const auto& rc = configs[ci];
    std::vector<std::size_t> active;
    bool want_seq = false;
    bool want_raster = false;
    for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
      const Mode mode = canonical_mode(cfg.metrics[mi]);
      try {
        check_capability(cfg.metrics[mi], mode, rc);
      } catch (const Error&) {
        continue;
      }
      active.push_back(mi);
      (mode == Mode::kSequence ? want_seq : want_raster) = true;
    }
    if (active.empty()) continue;

    for (std::size_t mi : active) {
      SweepCombo combo;
      combo.metric = cfg.metrics[mi];
      combo.mode = canonical_mode(combo.metric);
      combo.config = rc;
      table[mi][ci] = std::move(combo);
    }

    for (std::size_t d = 0; d < grid.size(); ++d) {
      const auto ref = represent(originals[d], rc, cfg.b, want_seq, want_raster);
      std::vector<ChartRepresentation> reps;
      reps.reserve(kPerturbationCount);
      for (const auto& cp : candidates[d]) reps.push_back(represent(cp, rc, cfg.b, want_seq, want_raster));

      for (std::size_t mi : active) {
        SweepCombo& combo = *table[mi][ci];
        std::vector<double> dist(kPerturbationCount);
        std::vector<bool> degen(kPerturbationCount);
        for (std::size_t p = 0; p < kPerturbationCount; ++p) {
          const auto dv = compare(ref, reps[p], combo.metric, combo.mode, opts);
          dist[p] = dv.value;
          degen[p] = dv.degenerate;
        }
        const auto normalized = combo.metric == MetricId::kMid ? mid_normalize(dist) : dist;
        const auto scores = scale_1_9(normalized);
        const auto ranks = ordinal_ranks(dist);
        for (std::size_t p = 0; p < kPerturbationCount; ++p) {
          combo.cells.push_back({d, p, dist[p], degen[p], ranks[p], scores[p]});
        }
      }
    }
  }

  SweepResult result;
  result.grid = grid;
  for (auto& row : table) {
    for (auto& c : row) {
      if (c) result.combos.push_back(std::move(*c));
    }
  }
  if (truth) attach_agreement(result, *truth);
  return result;
}

SweepResult sweep(const TimeSeries& source, const SweepConfig& cfg, const GroundTruth* truth) {
  const auto grid = build_grid(source, cfg.lengths, cfg.selections, cfg.seed);
  return run_sweep(grid, cfg, perturbation_candidates(cfg.perturb), truth);
}

void attach_agreement(SweepResult& result, const GroundTruth& truth) {
  if (truth.datasets() != result.grid.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ground truth covers " + std::to_string(truth.datasets()) +
                                                 " datasets but the grid has " + std::to_string(result.grid.size()));
  }
  std::vector<double> flat_truth;
  for (const auto& row : truth.mean_rank) flat_truth.insert(flat_truth.end(), row.begin(), row.end());
  const auto truth_ranks = truth.ordinal();
  for (auto& combo : result.combos) {
    Agreement a;
    a.r2 = r_squared(combo.scores(), flat_truth);
    const auto ranks = combo.ranks_by_dataset();
    a.f1 = f1_rank1(ranks, truth_ranks);
    a.seq_nmi = mean_sequence_nmi(ranks, truth_ranks);
    combo.agreement = a;
  }
}

GroundTruth truth_from_combo(const SweepCombo& combo) {
  GroundTruth t;
  for (const auto& c : combo.cells) {
    if (c.dataset >= t.mean_rank.size()) t.mean_rank.resize(c.dataset + 1);
    t.mean_rank[c.dataset][c.candidate] = c.score;
  }
  return t;
}

double r_squared_for_candidate(const SweepCombo& combo, const GroundTruth& truth, std::size_t candidate) {
  std::vector<double> scores;
  std::vector<double> target;
  for (const auto& c : combo.cells) {
    if (c.candidate != candidate) continue;
    scores.push_back(c.score);
    target.push_back(truth.mean_rank.at(c.dataset)[candidate]);
  }
  return r_squared(scores, target);
}

double spearman(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorCode::kInvalidArgument, "spearman needs paired ranks, n >= 2");
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double rank_agreement(const SweepCombo& a, const SweepCombo& b) {
  const auto ra = a.ranks_by_dataset();
  const auto rb = b.ranks_by_dataset();
  if (ra.size() != rb.size() || ra.empty()) throw Error(ErrorCode::kInvalidArgument, "combos cover different grids");
  double sum = 0.0;
  for (std::size_t d = 0; d < ra.size(); ++d) sum += spearman(ra[d], rb[d]);
  return sum / static_cast<double>(ra.size());
}

}  // namespace patred
