#include "patred/redundancy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "patred/error.hpp"
#include "patred/rng.hpp"

namespace patred {

namespace {

std::vector<Point> ordered_origin(const PointSet& ps) {
  auto pts = ps.origin_points();
  if (pts.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "redundancy needs at least 2 origin points");
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x < pts[i - 1].x) {
      throw Error(ErrorCode::kInvalidArgument, "origin points must be ordered by x");
    }
  }
  return pts;
}

std::string fmt_real(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(RedundancyKind kind) {
  switch (kind) {
    case RedundancyKind::kNone: return "none";
    case RedundancyKind::kEquidistant: return "equidistant";
    case RedundancyKind::kAreaLine: return "areaLine";
    case RedundancyKind::kCloud: return "cloud";
    case RedundancyKind::kGaussCloud: return "gaussCloud";
  }
  return "none";
}

RedundancyKind parse_redundancy_kind(std::string_view name) {
  std::string s;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "none") return RedundancyKind::kNone;
  if (s == "equidistant" || s == "npoint" || s == "n") return RedundancyKind::kEquidistant;
  if (s == "arealine") return RedundancyKind::kAreaLine;
  if (s == "cloud") return RedundancyKind::kCloud;
  if (s == "gausscloud") return RedundancyKind::kGaussCloud;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown redundancy kind '" + std::string(name) +
                  "' (expected none, equidistant, areaLine, cloud or gaussCloud)");
}

void RedundancyConfig::validate() const {
  if (n_points < 0) throw Error(ErrorCode::kInvalidArgument, "redundancy n must be >= 0");
  if (kind == RedundancyKind::kAreaLine) {
    if (copies < 1) throw Error(ErrorCode::kInvalidArgument, "area-line copies must be >= 1");
    if (!(shift >= 0.0) || shift * (copies - 1) > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "area-line shift must satisfy 0 <= shift*(copies-1) <= 1");
    }
  }
  if (kind == RedundancyKind::kCloud && !(eta >= 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cloud eta must lie in [0,1]");
  }
  if (kind == RedundancyKind::kGaussCloud && !(sd >= 0.0 && sd <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gauss-cloud sd must lie in [0,1]");
  }
}

std::string RedundancyConfig::label() const {
  std::string out(to_string(kind));
  if (kind == RedundancyKind::kNone) return out;
  out += "_" + std::to_string(n_points);
  if (kind == RedundancyKind::kCloud) out += "_eta" + fmt_real(eta);
  if (kind == RedundancyKind::kGaussCloud) out += "_sd" + fmt_real(sd);
  return out;
}

PointSet equidistant(const PointSet& ps, int n) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "redundancy n must be >= 0");
  const auto pts = ordered_origin(ps);
  const std::size_t added = static_cast<std::size_t>(n);
  std::vector<PointSet::Entry> out;
  out.reserve(pts.size() + added * (pts.size() - 1));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point a = pts[i];
    const Point b = pts[i + 1];
    out.push_back({a, true});
    for (std::size_t k = 1; k <= added; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(added + 1);
      out.push_back({{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, false});
    }
  }
  out.push_back({pts.back(), true});
  return PointSet(std::move(out));
}

PointSet area_line(const PointSet& ps, int n, int copies, double shift) {
  if (copies < 1) throw Error(ErrorCode::kInvalidArgument, "area-line copies must be >= 1");
  if (!(shift >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "area-line shift must be >= 0");
  const PointSet base = equidistant(ps, n);
  const auto src = base.entries();
  std::vector<PointSet::Entry> out(src.begin(), src.end());
  out.reserve(src.size() * static_cast<std::size_t>(copies));
  for (int k = 1; k < copies; ++k) {
    const double dy = shift * k;
    for (const auto& e : src) {
      out.push_back({{e.p.x, std::min(1.0, e.p.y + dy)}, false});
    }
  }
  return PointSet(std::move(out));
}

PointSet cloud(const PointSet& ps, int n, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "cloud eta must be >= 0");
  PointSet base = equidistant(ps, n);
  if (eta == 0.0) return base;
  Rng rng(seed);
  std::vector<PointSet::Entry> out(base.entries().begin(), base.entries().end());
  for (auto& e : out) {
    if (e.origin) continue;
    e.p.y = std::min(1.0, e.p.y + eta * rng.uniform());
  }
  return PointSet(std::move(out));
}

PointSet gauss_cloud(const PointSet& ps, int n, double sd, std::uint64_t seed) {
  if (!(sd >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "gauss-cloud sd must be >= 0");
  PointSet base = equidistant(ps, n);
  if (sd == 0.0) return base;
  Rng rng(seed);
  std::vector<PointSet::Entry> out(base.entries().begin(), base.entries().end());
  constexpr int kMaxRedraws = 64;
  for (auto& e : out) {
    if (e.origin) continue;
    double y = e.p.y + sd * rng.normal();
    for (int tries = 0; (y < 0.0 || y > 1.0) && tries < kMaxRedraws; ++tries) {
      y = e.p.y + sd * rng.normal();
    }
    e.p.y = std::clamp(y, 0.0, 1.0);
  }
  return PointSet(std::move(out));
}

PointSet apply_redundancy(const PointSet& ps, const RedundancyConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case RedundancyKind::kNone: return equidistant(ps, 0);
    case RedundancyKind::kEquidistant: return equidistant(ps, cfg.n_points);
    case RedundancyKind::kAreaLine: return area_line(ps, cfg.n_points, cfg.copies, cfg.shift);
    case RedundancyKind::kCloud: return cloud(ps, cfg.n_points, cfg.eta, cfg.seed);
    case RedundancyKind::kGaussCloud: return gauss_cloud(ps, cfg.n_points, cfg.sd, cfg.seed);
  }
  return ps;
}

}  // namespace patred
