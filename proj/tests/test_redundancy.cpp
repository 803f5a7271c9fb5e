#include <gtest/gtest.h>

#include <random>

#include "patred/error.hpp"
#include "patred/redundancy.hpp"
#include "support.hpp"

using namespace patred;

namespace {

PointSet simple() { return to_pointset(std::vector<double>{0.2, 0.8, 0.4}); }

}  // namespace

TEST(Equidistant, OnePointOnTwoPointLine) {
  const auto ps = equidistant(to_pointset(std::vector<double>{0.0, 1.0}), 1);
  ASSERT_EQ(ps.size(), 3u);
  EXPECT_EQ(ps.entries()[1].p, (Point{0.5, 0.5}));
  EXPECT_FALSE(ps.entries()[1].origin);
}

TEST(Equidistant, SizeAndOriginsRetained) {
  for (int n : kSweepPointCounts) {
    const auto ps = equidistant(simple(), n);
    EXPECT_EQ(ps.size(), 3u + static_cast<std::size_t>(n) * 2u);
    EXPECT_EQ(ps.origin_count(), 3u);
    const auto origins = ps.origin_points();
    const auto expect = simple().origin_points();
    EXPECT_EQ(origins, expect);
  }
}

TEST(Equidistant, ZeroIsIdentity) {
  const auto ps = equidistant(simple(), 0);
  ASSERT_EQ(ps.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(ps.entries()[i].p, simple().entries()[i].p);
}

TEST(Equidistant, NegativeRejected) { EXPECT_THROW(equidistant(simple(), -1), Error); }

TEST(AreaLine, CopyCountAndShift) {
  const auto ps = area_line(simple(), 2, 4, 0.05);
  EXPECT_EQ(ps.size(), 4u * (3u + 2u * 2u));
  EXPECT_EQ(ps.origin_count(), 3u);
  // Copy k sits exactly k * shift above the base where no clamping happens.
  const std::size_t per = 7;
  for (std::size_t k = 1; k < 4; ++k) {
    for (std::size_t i = 0; i < per; ++i) {
      const auto& base = ps.entries()[i].p;
      const auto& copy = ps.entries()[k * per + i].p;
      EXPECT_EQ(copy.x, base.x);
      EXPECT_NEAR(copy.y, std::min(1.0, base.y + 0.05 * static_cast<double>(k)), 1e-15);
    }
  }
}

TEST(AreaLine, ClampsAtTop) {
  const auto ps = area_line(to_pointset(std::vector<double>{1.0, 0.99}), 0, 3, 0.5);
  for (const auto& e : ps.entries()) EXPECT_LE(e.p.y, 1.0);
}

TEST(Cloud, OnlyAddedPointsMoveUpWithinEta) {
  const auto base = equidistant(simple(), 10);
  const auto ps = cloud(simple(), 10, 0.1, 7);
  ASSERT_EQ(ps.size(), base.size());
  bool moved = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& a = base.entries()[i];
    const auto& b = ps.entries()[i];
    EXPECT_EQ(a.p.x, b.p.x);
    if (a.origin) {
      EXPECT_EQ(a.p.y, b.p.y);
    } else {
      EXPECT_GE(b.p.y, a.p.y);
      EXPECT_LE(b.p.y, std::min(1.0, a.p.y + 0.1));
      moved = moved || b.p.y != a.p.y;
    }
  }
  EXPECT_TRUE(moved);
}

TEST(Cloud, DeterministicPerSeed) {
  const auto a = cloud(simple(), 25, 0.2, 99);
  const auto b = cloud(simple(), 25, 0.2, 99);
  const auto c = cloud(simple(), 25, 0.2, 100);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.entries()[i].p, b.entries()[i].p);
    differs = differs || !(a.entries()[i].p == c.entries()[i].p);
  }
  EXPECT_TRUE(differs);
}

TEST(Cloud, ZeroEtaEqualsEquidistant) {
  const auto a = cloud(simple(), 5, 0.0, 1);
  const auto b = equidistant(simple(), 5);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.entries()[i].p, b.entries()[i].p);
}

TEST(GaussCloud, StaysInUnitSquare) {
  const auto ps = gauss_cloud(to_pointset(std::vector<double>{0.0, 1.0, 0.0}), 50, 0.5, 3);
  for (const auto& e : ps.entries()) {
    EXPECT_GE(e.p.y, 0.0);
    EXPECT_LE(e.p.y, 1.0);
  }
}

TEST(Config, ValidateAndLabels) {
  RedundancyConfig c{RedundancyKind::kAreaLine, 10};
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.label(), "areaLine_10");
  c.copies = 0;
  EXPECT_THROW(c.validate(), Error);
  RedundancyConfig cl{RedundancyKind::kCloud, 25};
  cl.eta = 0.1;
  EXPECT_EQ(cl.label(), "cloud_25_eta0.1");
  cl.eta = 1.5;
  EXPECT_THROW(cl.validate(), Error);
  EXPECT_TRUE((RedundancyConfig{RedundancyKind::kEquidistant, 3}).is_sequence_compatible());
  EXPECT_FALSE((RedundancyConfig{RedundancyKind::kCloud, 3}).is_sequence_compatible());
}

TEST(Config, ParseKindNames) {
  for (auto k : {RedundancyKind::kNone, RedundancyKind::kEquidistant, RedundancyKind::kAreaLine, RedundancyKind::kCloud,
                 RedundancyKind::kGaussCloud}) {
    EXPECT_EQ(parse_redundancy_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_redundancy_kind("arealine"), RedundancyKind::kAreaLine);
  EXPECT_THROW(parse_redundancy_kind("spline"), Error);
}

TEST(Config, NoneMatchesEquidistantZero) {
  std::mt19937_64 gen(11);
  const auto ps = to_pointset(testing_support::random_series(gen, 9));
  const auto a = apply_redundancy(ps, RedundancyConfig{RedundancyKind::kNone, 0});
  const auto b = apply_redundancy(ps, RedundancyConfig{RedundancyKind::kEquidistant, 0});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.entries()[i].p, b.entries()[i].p);
}
