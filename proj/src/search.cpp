#include "patred/search.hpp"

#include <algorithm>
#include <numeric>

#include "patred/error.hpp"

namespace patred {

int SearchRequest::grid_side() const { return bins_per_segment ? patred::bins_per_segment(window_length()) : b; }

void SearchRequest::validate() const {
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  if (stride < 1) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  if (window_length() < 2) throw Error(ErrorCode::kInvalidArgument, "window length must be >= 2");
  if (window_length() > series.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pattern/window length " + std::to_string(window_length()) +
                                                 " exceeds series length " + std::to_string(series.size()));
  }
  if (b < 2) throw Error(ErrorCode::kInvalidArgument, "grid side must be >= 2");
  redundancy.validate();
  check_capability(metric, resolved_mode(), redundancy);
}

std::vector<std::size_t> rank_windows(std::span<const double> distances) {
  std::vector<std::size_t> order(distances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });
  std::vector<std::size_t> ranks(distances.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
  return ranks;
}

std::size_t search_cost(const SearchRequest& req) {
  const std::size_t n = window_count(req.series.size(), req.window_length(), req.stride);
  if (req.resolved_mode() == Mode::kSequence) return n * req.window_length();
  const auto side = static_cast<std::size_t>(req.grid_side());
  return n * side * side;
}

std::vector<double> search_reference(const SearchRequest& req) { return req.pattern.resample(req.window_length()); }

std::vector<MatchResult> search(const SearchRequest& req) {
  req.validate();
  const Mode mode = req.resolved_mode();
  const bool seq = mode == Mode::kSequence;
  const int b = req.grid_side();
  DistanceOptions opts;
  opts.b = b;
  opts.mode = mode;
  // A flat window must not abort a whole scan.
  opts.degenerate = DegeneratePolicy::kIndependent;

  const auto reference = represent(to_pointset(search_reference(req)), req.redundancy, b, seq, !seq);

  const Normalizer normalize = req.normalization == WindowNormalization::kZScore
                                   ? Normalizer([](std::span<const double> s) { return normalize_zscore(s); })
                                   : Normalizer(normalize_minmax);
  auto wins = windows(req.series, req.window_length(), req.stride, normalize);

  std::vector<double> distances(wins.size());
  std::vector<bool> degenerate(wins.size());
  for (std::size_t i = 0; i < wins.size(); ++i) {
    const auto cand = represent(to_pointset(wins[i].values), req.redundancy, b, seq, !seq);
    const auto d = compare(reference, cand, req.metric, mode, opts);
    distances[i] = d.value;
    degenerate[i] = d.degenerate;
  }

  const auto ranks = rank_windows(distances);
  std::vector<std::size_t> order(wins.size());
  for (std::size_t i = 0; i < wins.size(); ++i) order[ranks[i] - 1] = i;

  const std::size_t gap = req.exclusion_gap();
  std::vector<MatchResult> out;
  for (std::size_t idx : order) {
    if (out.size() == req.top_k) break;
    const std::size_t start = wins[idx].start;
    const bool clash = std::any_of(out.begin(), out.end(), [&](const MatchResult& m) {
      const std::size_t diff = start > m.start_index ? start - m.start_index : m.start_index - start;
      return diff < gap;
    });
    if (clash) continue;
    out.push_back({start, distances[idx], out.size() + 1, std::move(wins[idx].values), degenerate[idx]});
  }
  return out;
}

std::vector<MidPoint> match_mid_points(const SearchRequest& req, std::span<const MatchResult> matches) {
  const int b = req.grid_side();
  const auto reference = rasterize(apply_redundancy(to_pointset(search_reference(req)), req.redundancy), b);
  std::vector<MidPoint> out;
  out.push_back(mid_reference(reference, "P_o"));
  for (const auto& m : matches) {
    const auto cand = rasterize(apply_redundancy(to_pointset(m.window), req.redundancy), b);
    const auto mi = mutual_information(joint_occupancy(reference, cand));
    const double nmi = (mi.hx > 0.0 && mi.hy > 0.0) ? normalized_mutual_information(mi) : 0.0;
    out.push_back(mid_point(mi, nmi, "#" + std::to_string(m.rank) + " @" + std::to_string(m.start_index)));
  }
  return out;
}

}  // namespace patred
