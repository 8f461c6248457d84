// Copyright 2026 The spata Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spata/binning.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracle.h"
#include "spata/errors.h"

namespace spata {
namespace {

std::vector<double> one_to_ten() {
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i);
  return v;
}

TEST(BinSpecTest, AcceptsOddAtLeastThree) {
  EXPECT_EQ(BinSpec(3).bins(), 3);
  EXPECT_EQ(BinSpec(9).center(), 5);
  EXPECT_EQ(BinSpec(11).center(), 6);
}

TEST(BinSpecTest, RejectsEvenOrSmall) {
  for (int b : {-1, 0, 1, 2, 4, 8, 10}) {
    EXPECT_THROW(BinSpec{b}, ConfigError) << b;
  }
  try {
    BinSpec spec(8);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bins must be odd and >= 3"),
              std::string::npos);
  }
}

TEST(FeatureStatsTest, OneToTen) {
  const auto v = one_to_ten();
  const FeatureStats s = feature_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 5.5);
  EXPECT_NEAR(s.std, std::sqrt(8.25), 1e-12);
  EXPECT_NEAR(s.std, 2.872281, 1e-6);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 10.0);
  EXPECT_EQ(s.count, 10u);
}

TEST(FeatureStatsTest, ConstantAndSingleton) {
  const std::vector<double> sevens = {7, 7, 7};
  FeatureStats s = feature_stats(sevens);
  EXPECT_EQ(s.mean, 7.0);
  EXPECT_EQ(s.std, 0.0);

  const std::vector<double> one = {-2.25};
  s = feature_stats(one);
  EXPECT_EQ(s.min, -2.25);
  EXPECT_EQ(s.max, -2.25);
  EXPECT_EQ(s.mean, -2.25);
  EXPECT_EQ(s.std, 0.0);
}

TEST(FeatureStatsTest, ConstantWithRoundingHasNoSpread) {
  // 0.1 summed ten times is not exactly 1.0; the mean must still equal 0.1.
  const std::vector<double> v(10, 0.1);
  const FeatureStats s = feature_stats(v);
  EXPECT_EQ(s.mean, 0.1);
  EXPECT_EQ(s.std, 0.0);
}

TEST(FeatureStatsTest, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(feature_stats(std::vector<double>{}), DataError);
  EXPECT_THROW(feature_stats(std::vector<double>{1.0, NAN}), DataError);
  EXPECT_THROW(feature_stats(std::vector<double>{INFINITY}), DataError);
}

TEST(SubdomainBoundsTest, OneToTenNineBins) {
  const auto v = one_to_ten();
  const FeatureStats s = feature_stats(v);
  const auto bounds = subdomain_bounds(s, BinSpec(9));
  ASSERT_EQ(bounds.size(), 9u);
  for (int bin : {1, 2, 8, 9}) EXPECT_TRUE(bounds[bin - 1].empty) << bin;
  for (int bin = 3; bin <= 7; ++bin) EXPECT_FALSE(bounds[bin - 1].empty) << bin;

  const BinInterval& b5 = bounds[4];
  EXPECT_NEAR(b5.lower, 4.0639, 1e-4);
  EXPECT_NEAR(b5.upper, 6.9361, 1e-4);
  EXPECT_TRUE(b5.lower_open);

  const BinInterval& b3 = bounds[2];
  EXPECT_EQ(b3.lower, 1.0);
  EXPECT_FALSE(b3.lower_open);
  EXPECT_NEAR(b3.upper, 1.1916, 1e-4);

  // Brute-force membership of the vector itself.
  std::vector<int> members(10, 0);
  for (double x : v) {
    int hits = 0;
    for (const BinInterval& iv : bounds) {
      if (iv.contains(x)) {
        ++hits;
        ++members[iv.bin];
      }
    }
    EXPECT_EQ(hits, 1) << x;
  }
  EXPECT_EQ(members[3], 1);  // {1}
  EXPECT_EQ(members[5], 2);  // {5, 6}
}

TEST(SubdomainBoundsTest, ConstantVectorUsesCenter) {
  const FeatureStats s = feature_stats(std::vector<double>{4, 4, 4, 4});
  const auto bounds = subdomain_bounds(s, BinSpec(9));
  for (const BinInterval& iv : bounds) {
    if (iv.bin == 5) {
      EXPECT_FALSE(iv.empty);
      EXPECT_EQ(iv.lower, 4.0);
      EXPECT_EQ(iv.upper, 4.0);
      EXPECT_TRUE(iv.contains(4.0));
    } else {
      EXPECT_TRUE(iv.empty);
    }
  }
}

TEST(SubdomainBoundsTest, CenterBinIsHalfSigmaAroundMean) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(10.0, 4.0);
  for (int b : {3, 5, 9, 11}) {
    std::vector<double> v(200);
    for (double& x : v) x = normal(rng);
    const FeatureStats s = feature_stats(v);
    const auto bounds = subdomain_bounds(s, BinSpec(b));
    const BinInterval& center = bounds[(b + 1) / 2 - 1];
    EXPECT_DOUBLE_EQ(center.lower, std::max(s.mean - 0.5 * s.std, s.min));
    EXPECT_DOUBLE_EQ(center.upper, std::min(s.mean + 0.5 * s.std, s.max));
  }
}

TEST(MapValueTest, OneToTenExamples) {
  const auto v = one_to_ten();
  const FeatureStats s = feature_stats(v);
  const BinSpec spec(9);
  const auto cuts = bin_cuts(s, spec);
  const auto bounds = subdomain_bounds(s, spec);
  EXPECT_EQ(map_value(5.0, s, cuts, spec), 5);
  EXPECT_EQ(map_value(0.0, s, cuts, spec), 0);
  EXPECT_EQ(map_value(1.0, s, cuts, spec), 3);
  EXPECT_EQ(map_value(10.0, s, cuts, spec), 7);
  EXPECT_EQ(map_value(10.5, s, cuts, spec), 0);
  EXPECT_EQ(map_value(NAN, s, cuts, spec), 0);
  EXPECT_EQ(map_value(5.0, bounds), 5);
  EXPECT_EQ(map_value(0.0, bounds), 0);
  EXPECT_EQ(map_value(1.0, bounds), 3);
}

TEST(MapValueTest, ConstantMapsToCenterOnlyAtTheValue) {
  const FeatureStats s = feature_stats(std::vector<double>{2, 2});
  const BinSpec spec(5);
  const auto cuts = bin_cuts(s, spec);
  EXPECT_EQ(map_value(2.0, s, cuts, spec), 3);
  EXPECT_EQ(map_value(2.5, s, cuts, spec), 0);
}

// Both map_value overloads agree with the clause-by-clause oracle, and a
// grid over [min, max] lands in exactly one interval.
TEST(MapValueTest, AgreesWithOracleAndPartitions) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(2, 60);
  std::lognormal_distribution<double> spread(0.0, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int b = 3 + 2 * (trial % 5);
    const double scale = spread(rng);
    const double shift = unit(rng) * 100;
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    for (double& x : v) x = shift + scale * unit(rng) * unit(rng);
    const FeatureStats s = feature_stats(v);
    const oracle::Stats os = oracle::stats_of(v);
    ASSERT_EQ(s.mean, os.mean);
    ASSERT_EQ(s.std, os.std);

    const BinSpec spec(b);
    const auto cuts = bin_cuts(s, spec);
    const auto bounds = subdomain_bounds(s, spec);
    for (int g = 0; g <= 500; ++g) {
      const double x = g == 500 ? s.max : s.min + (s.max - s.min) * g / 500.0;
      const int expect = oracle::map_value(x, os, b);
      ASSERT_EQ(map_value(x, s, cuts, spec), expect) << x;
      ASSERT_EQ(map_value(x, bounds), expect) << x;
      ASSERT_GE(expect, 1);
      int hits = 0;
      for (const BinInterval& iv : bounds) hits += iv.contains(x) ? 1 : 0;
      ASSERT_EQ(hits, 1);
    }
  }
}

}  // namespace
}  // namespace spata
