#pragma once

#include <span>
#include <string>
#include <vector>

#include "patred/information.hpp"
#include "patred/raster.hpp"

namespace patred {

/// A point in the Mutual Information Diagram. The reference sits on the
/// horizontal axis at (H(reference), 0); each candidate is placed at radius
/// H(candidate) and angle arccos(NMI).
struct MidPoint {
  std::string label;
  double radius = 0.0;
  double angle = 0.0;
  double x = 0.0;
  double y = 0.0;
  double nmi = 1.0;
  double vi = 0.0;        // variation of information, reported separately from the chord
  double distance = 0.0;  // chord to the reference point
};

MidPoint mid_reference(const RasterImage& reference, std::string label = "P_o");

/// Throws kDegenerate when either occupancy entropy is zero.
MidPoint mid_point(const RasterImage& reference, const RasterImage& candidate, std::string label = {});

/// Same construction from precomputed entropies. The three-argument form takes
/// the NMI explicitly (degenerate comparisons are placed with NMI = 0).
MidPoint mid_point(const MutualInformation& m, std::string label = {});
MidPoint mid_point(const MutualInformation& m, double nmi, std::string label);

/// sqrt(Hx^2 + Hy^2 - 2 Hx Hy NMI), evaluated as sqrt((Hx-Hy)^2 + 2 Hx Hy (1-NMI)).
double mid_chord(double hx, double hy, double nmi);

double mid_distance(const RasterImage& reference, const RasterImage& candidate);

/// Min-max over the candidate set; a degenerate range maps to 0.5.
std::vector<double> mid_normalize(std::span<const double> distances);

}  // namespace patred
