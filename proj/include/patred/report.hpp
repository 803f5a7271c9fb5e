#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "patred/evalbench.hpp"
#include "patred/mid.hpp"
#include "patred/search.hpp"

namespace patred {

enum class Statistic { kR2, kF1, kSeqNmi };

std::string_view to_string(Statistic s);

using CandidateNamer = std::function<std::string(std::size_t candidate)>;

/// Names candidates after the nine perturbations.
std::string perturbation_name(std::size_t candidate);

/// One row per (combo, dataset, candidate), in combo order:
/// metric,mode,kind,n,eta,dataset,perturbation,distance,degenerate,rank,score,r2,f1,seq_nmi
/// Agreement columns are empty when no ground truth was attached.
std::string sweep_csv(const SweepResult& result, const CandidateNamer& namer = perturbation_name);

/// Statistic across N: metric,kind,eta,N0,...,N100,min,max.
std::string trajectory_table_csv(const SweepResult& result, Statistic stat);

/// R^2 per candidate column across N: perturbation,metric,kind,eta,N0,...,min,max.
std::string per_candidate_r2_csv(const SweepResult& result, const GroundTruth& truth,
                                 const CandidateNamer& namer = perturbation_name);

/// Sparkline table: one row per (metric, kind, eta) showing the statistic over N.
std::string trajectory_svg(const SweepResult& result, Statistic stat);

/// Scatter of MID points; the first point is the reference.
std::string mid_scatter_svg(std::span<const MidPoint> points);

/// Small line charts of each match beside the reference pattern.
std::string match_strip_svg(std::span<const double> reference, std::span<const MatchResult> matches);

}  // namespace patred
