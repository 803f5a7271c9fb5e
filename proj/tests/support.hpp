#pragma once

// Shared fixtures for the test binaries. The oracles here are deliberately
// naive re-derivations and must not call into the library under test.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

inline std::vector<double> random_series(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

inline std::vector<double> random_walk(std::mt19937_64& gen, std::size_t n, double step = 1.0) {
  std::normal_distribution<double> z(0.0, step);
  std::vector<double> v(n);
  double x = 0.0;
  for (auto& e : v) {
    x += z(gen);
    e = x;
  }
  return v;
}

// Sum over cells of p log2(p / (px py)); a different route to I than Hx + Hy - Hxy.
inline double oracle_mi(const std::vector<std::vector<double>>& counts) {
  double total = 0.0;
  std::vector<double> rs(counts.size(), 0.0);
  std::vector<double> cs(counts[0].size(), 0.0);
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t c = 0; c < counts[r].size(); ++c) {
      total += counts[r][c];
      rs[r] += counts[r][c];
      cs[c] += counts[r][c];
    }
  }
  double mi = 0.0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t c = 0; c < counts[r].size(); ++c) {
      if (counts[r][c] == 0.0) continue;
      const double p = counts[r][c] / total;
      mi += p * std::log2(p / ((rs[r] / total) * (cs[c] / total)));
    }
  }
  return mi;
}

inline double oracle_entropy(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / total) * std::log2(c / total);
  }
  return h;
}

inline double oracle_jsd(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) d += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) d += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return d;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("patred_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  return path;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline std::string series_csv(const std::vector<double>& v) {
  std::string s = "date,value\n";
  char buf[64];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "t%04zu,%.17g\n", i, v[i]);
    s += buf;
  }
  return s;
}

}  // namespace testing_support

namespace testing_support {

// Seven-point falling wedge: lower highs and lower lows converging downward.
inline const std::vector<double> kFallingWedge{1.0, 0.45, 0.8, 0.3, 0.6, 0.0, 0.35};

struct Planted {
  std::vector<double> series;
  std::size_t start = 0;
};

// Random walk with the wedge written over a seeded position. The wedge is
// scaled to the walk's typical local range and each planted point gets
// uniform noise of `noise` in normalized units.
inline Planted plant_wedge(std::uint64_t seed, std::size_t length = 300, double noise = 0.05) {
  std::mt19937_64 gen(seed);
  Planted out;
  out.series = random_walk(gen, length);
  const std::size_t w = kFallingWedge.size();
  std::uniform_int_distribution<std::size_t> pos(0, length - w);
  out.start = pos(gen);
  std::uniform_real_distribution<double> u(-noise, noise);
  const double base = out.series[out.start];
  const double scale = 4.0;
  for (std::size_t i = 0; i < w; ++i) {
    out.series[out.start + i] = base + scale * (kFallingWedge[i] + u(gen));
  }
  return out;
}

}  // namespace testing_support
