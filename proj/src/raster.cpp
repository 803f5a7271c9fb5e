#include "patred/raster.hpp"

#include <algorithm>
#include <cmath>

#include "patred/error.hpp"

namespace patred {

RasterImage::RasterImage(int b) : b_(b) {
  if (b < 2) throw Error(ErrorCode::kInvalidArgument, "raster grid side must be >= 2");
  counts_.assign(static_cast<std::size_t>(b) * static_cast<std::size_t>(b), 0);
}

int RasterImage::bin_of(double v) const {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "raster coordinate outside [0,1]");
  }
  const int bin = static_cast<int>(std::floor(v * b_));
  return std::min(bin, b_ - 1);
}

void RasterImage::add(const Point& p) {
  ++counts_[index(bin_of(p.y), bin_of(p.x))];
  ++total_;
}

RasterImage rasterize(const PointSet& ps, int b) {
  RasterImage img(b);
  for (const auto& e : ps.entries()) img.add(e.p);
  return img;
}

int bins_per_segment(std::size_t series_length) {
  if (series_length < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 points");
  const std::size_t b = 8 * (series_length - 1);
  return static_cast<int>(std::clamp<std::size_t>(b, 8, 128));
}

std::vector<double> marginal_pdf(const RasterImage& img) {
  if (img.total() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot build a pdf from an empty image");
  std::vector<double> p;
  const double total = static_cast<double>(img.total());
  for (auto c : img.cells()) {
    if (c > 0) p.push_back(static_cast<double>(c) / total);
  }
  return p;
}

std::vector<double> smoothed_cell_distribution(const RasterImage& img, double eps) {
  if (img.total() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot build a pdf from an empty image");
  std::vector<double> p(img.cell_count());
  const double total = static_cast<double>(img.total());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto c = img.cells()[i];
    p[i] = c > 0 ? static_cast<double>(c) / total : eps;
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

Histogram2x2 joint_occupancy(const RasterImage& x, const RasterImage& y) {
  if (x.b() != y.b()) {
    throw Error(ErrorCode::kInvalidArgument, "raster size mismatch: " + std::to_string(x.b()) + " vs " +
                                                 std::to_string(y.b()));
  }
  Histogram2x2 h;
  const auto cx = x.cells();
  const auto cy = y.cells();
  for (std::size_t i = 0; i < cx.size(); ++i) {
    const bool ox = cx[i] > 0;
    const bool oy = cy[i] > 0;
    if (ox && oy) ++h.n11;
    else if (ox) ++h.n10;
    else if (oy) ++h.n01;
    else ++h.n00;
  }
  return h;
}

std::vector<std::size_t> occupancy_set(const RasterImage& img) {
  std::vector<std::size_t> out;
  const auto c = img.cells();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > 0) out.push_back(i);
  }
  return out;
}

}  // namespace patred
