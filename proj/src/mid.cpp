#include "patred/mid.hpp"

#include <algorithm>
#include <cmath>

#include "patred/error.hpp"

namespace patred {

double mid_chord(double hx, double hy, double nmi) {
  const double c = std::clamp(nmi, 0.0, 1.0);
  const double d2 = (hx - hy) * (hx - hy) + 2.0 * hx * hy * (1.0 - c);
  return std::sqrt(std::max(d2, 0.0));
}

MidPoint mid_reference(const RasterImage& reference, std::string label) {
  const auto occ = joint_occupancy(reference, reference);
  const auto m = mutual_information(occ);
  MidPoint p;
  p.label = std::move(label);
  p.radius = m.hx;
  p.x = m.hx;
  return p;
}

MidPoint mid_point(const MutualInformation& m, double nmi, std::string label) {
  MidPoint p;
  p.label = std::move(label);
  p.nmi = std::clamp(nmi, 0.0, 1.0);
  p.radius = m.hy;
  p.angle = std::acos(p.nmi);
  p.x = p.radius * std::cos(p.angle);
  p.y = p.radius * std::sin(p.angle);
  p.vi = variation_of_information(m);
  p.distance = mid_chord(m.hx, m.hy, p.nmi);
  return p;
}

MidPoint mid_point(const MutualInformation& m, std::string label) {
  return mid_point(m, normalized_mutual_information(m), std::move(label));
}

MidPoint mid_point(const RasterImage& reference, const RasterImage& candidate, std::string label) {
  return mid_point(mutual_information(joint_occupancy(reference, candidate)), std::move(label));
}

double mid_distance(const RasterImage& reference, const RasterImage& candidate) {
  const auto m = mutual_information(joint_occupancy(reference, candidate));
  return mid_chord(m.hx, m.hy, normalized_mutual_information(m));
}

std::vector<double> mid_normalize(std::span<const double> distances) {
  if (distances.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to normalize");
  const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
  std::vector<double> out(distances.size(), 0.5);
  if (!(*hi > *lo)) return out;
  for (std::size_t i = 0; i < distances.size(); ++i) out[i] = (distances[i] - *lo) / (*hi - *lo);
  return out;
}

}  // namespace patred
