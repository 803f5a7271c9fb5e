#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "patred/core_data.hpp"
#include "patred/metrics.hpp"
#include "patred/redundancy.hpp"

namespace patred {

// ---- perturbations ---------------------------------------------------------------

enum class PerturbationId {
  kInterchange2,
  kTwoOutliers,
  kOutlierBegin,
  kOutlierMiddle,
  kShift2,
  kUniformNoise,
  kStraightLine,
  kZigzag,
  kRandomNoise,
};

inline constexpr std::size_t kPerturbationCount = 9;
inline constexpr std::array<PerturbationId, kPerturbationCount> kAllPerturbations = {
    PerturbationId::kInterchange2, PerturbationId::kTwoOutliers,  PerturbationId::kOutlierBegin,
    PerturbationId::kOutlierMiddle, PerturbationId::kShift2,      PerturbationId::kUniformNoise,
    PerturbationId::kStraightLine, PerturbationId::kZigzag,       PerturbationId::kRandomNoise};

std::string_view to_string(PerturbationId p);
PerturbationId parse_perturbation(std::string_view name);
/// Straight line, zigzag and random noise replace the data outright.
bool is_benchmark(PerturbationId p);

struct PerturbOptions {
  double noise_scale = 0.1;  // multiplier on U[-1,1] for kUniformNoise
  double outlier_sd = 3.0;   // outliers are placed at mean + outlier_sd * sd
};

/// Applies one perturbation to a normalized series. Values may leave [0,1]
/// (outliers); callers renormalize before comparing charts.
TimeSeries perturb(const TimeSeries& normalized, PerturbationId which, std::uint64_t seed,
                   const PerturbOptions& opts = {});

// ---- dataset grid ------------------------------------------------------------------

inline constexpr std::array<std::size_t, 4> kGridLengths = {6, 11, 16, 21};
inline constexpr std::size_t kGridSelections = 3;

struct GridChart {
  std::size_t id = 0;
  std::size_t start = 0;  // offset into the source series
  std::vector<double> values;  // raw slice
};

/// `selections` seeded random consecutive slices for each length; ids run
/// length-major.
std::vector<GridChart> build_grid(const TimeSeries& source, std::span<const std::size_t> lengths,
                                  std::size_t selections, std::uint64_t seed);

// ---- agreement statistics ------------------------------------------------------------

/// 1 + 8 (d - min) / (max - min); all 5 when the range is degenerate.
std::vector<double> scale_1_9(std::span<const double> distances);

/// Ordinal ranks (1-based); ties go to the earlier index.
std::vector<std::size_t> ordinal_ranks(std::span<const double> values);

/// Coefficient of determination of the OLS fit of truth on method scores.
/// Returns 0 when either input has zero variance.
double r_squared(std::span<const double> method_scores, std::span<const double> truth);

/// F1 of the binary "rank == 1" label over every (dataset, candidate) item.
double f1_rank1(std::span<const std::vector<std::size_t>> method_ranks,
                std::span<const std::vector<std::size_t>> truth_ranks);

/// NMI of two paired discrete sequences. Zero marginal entropy gives 0,
/// except two identical constant sequences, which give 1.
double sequence_nmi(std::span<const std::size_t> a, std::span<const std::size_t> b);
double mean_sequence_nmi(std::span<const std::vector<std::size_t>> method_ranks,
                         std::span<const std::vector<std::size_t>> truth_ranks);

// ---- ground truth --------------------------------------------------------------------

/// Mean rank per (dataset, perturbation) as supplied by raters.
struct GroundTruth {
  std::vector<std::array<double, kPerturbationCount>> mean_rank;  // [dataset][perturbation]

  std::size_t datasets() const { return mean_rank.size(); }
  std::vector<std::vector<std::size_t>> ordinal() const;
};

/// CSV columns dataset_id, perturbation_id, mean_rank; perturbation_id is a
/// name (e.g. shift2) or an index 0..8. Every (dataset, perturbation) pair for
/// `datasets` datasets must be present exactly once.
GroundTruth parse_ground_truth(const CsvTable& table, std::size_t datasets = 12);
GroundTruth load_ground_truth(const std::filesystem::path& path, std::size_t datasets = 12);
std::string ground_truth_csv(const GroundTruth& truth);

// ---- sweep -----------------------------------------------------------------------------

/// Equidistant, area-line and cloud (every eta) over the sweep point counts.
std::vector<RedundancyConfig> default_sweep_configs(std::uint64_t seed);

struct SweepConfig {
  std::vector<MetricId> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  std::vector<RedundancyConfig> configs;  // default_sweep_configs(seed) when empty
  int b = kDefaultBins;
  std::uint64_t seed = 0;
  PerturbOptions perturb;
  std::vector<std::size_t> lengths{kGridLengths.begin(), kGridLengths.end()};
  std::size_t selections = kGridSelections;
};

struct Agreement {
  double r2 = 0.0;
  double f1 = 0.0;
  double seq_nmi = 0.0;
};

struct SweepCell {
  std::size_t dataset = 0;
  std::size_t candidate = 0;  // perturbation index (or family member)
  double distance = 0.0;
  bool degenerate = false;
  std::size_t rank = 0;
  double score = 0.0;  // scaled to [1,9]
};

/// One (metric, redundancy config) pair with its cells in (dataset, candidate) order.
struct SweepCombo {
  MetricId metric = MetricId::kNmi;
  Mode mode = Mode::kRaster;
  RedundancyConfig config;
  std::vector<SweepCell> cells;
  std::optional<Agreement> agreement;

  std::string label() const;  // e.g. "nmi_areaLine_10"
  std::vector<std::vector<std::size_t>> ranks_by_dataset() const;
  std::vector<double> scores() const;
};

struct SweepResult {
  std::vector<GridChart> grid;
  std::vector<SweepCombo> combos;  // (metric, kind, N, eta) order

  const SweepCombo* find(MetricId metric, const RedundancyConfig& cfg) const;
};

/// Builds candidates for one normalized original chart; must return exactly
/// kPerturbationCount series of the original's length.
using CandidateGenerator =
    std::function<std::vector<TimeSeries>(const TimeSeries& original, std::size_t dataset, std::uint64_t seed)>;

/// The nine Table-1 perturbations.
CandidateGenerator perturbation_candidates(const PerturbOptions& opts);

/// OutlierMiddle at 1..9 standard deviations; the natural truth is rank = magnitude.
CandidateGenerator outlier_magnitude_family();

/// Scores every compatible (metric, config) pair over the grid. Agreement is
/// filled in when `truth` is given.
SweepResult run_sweep(const std::vector<GridChart>& grid, const SweepConfig& cfg, const CandidateGenerator& gen,
                      const GroundTruth* truth = nullptr);

SweepResult sweep(const TimeSeries& source, const SweepConfig& cfg, const GroundTruth* truth = nullptr);

/// Fills combo.agreement against `truth` for every combo.
void attach_agreement(SweepResult& result, const GroundTruth& truth);

/// Truth whose mean ranks are exactly the combo's scaled scores.
GroundTruth truth_from_combo(const SweepCombo& combo);

/// R^2 restricted to one candidate column across datasets.
double r_squared_for_candidate(const SweepCombo& combo, const GroundTruth& truth, std::size_t candidate);

/// Spearman correlation of two rank vectors (permutations of 1..n).
double spearman(std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Mean per-dataset Spearman correlation between two combos' ranks.
double rank_agreement(const SweepCombo& a, const SweepCombo& b);

}  // namespace patred
