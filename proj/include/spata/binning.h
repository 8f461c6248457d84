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

#ifndef SPATA_BINNING_H_
#define SPATA_BINNING_H_

// Single-level discretization of one numeric feature. The domain
// [min, max] of a vector is split into at most `b` subdomains, each one
// population standard deviation wide and centered so that bin (b+1)/2
// holds (mean - 0.5 std, mean + 0.5 std]. Edge bins are clipped to the
// domain. Values outside the domain map to bin 0.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spata {

using BinNumber = std::uint16_t;

// Sentinel bin for values outside a feature's observed domain.
inline constexpr BinNumber kOutOfDomain = 0;

struct FeatureStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;

  bool operator==(const FeatureStats&) const = default;
};

// Maximum number of bins. Always odd and >= 3.
class BinSpec {
 public:
  // Throws ConfigError unless bins is odd and >= 3.
  explicit BinSpec(int bins);

  int bins() const { return bins_; }
  int center() const { return (bins_ + 1) / 2; }

  bool operator==(const BinSpec&) const = default;

 private:
  int bins_;
};

struct BinInterval {
  BinNumber bin = 0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_open = false;  // upper is always closed
  bool empty = true;

  bool contains(double x) const {
    if (empty) return false;
    return (lower_open ? x > lower : x >= lower) && x <= upper;
  }
};

// Two-pass mean and population variance, accumulated sequentially in index
// order so results are bit-reproducible. Throws DataError on an empty
// vector or any non-finite value.
FeatureStats feature_stats(std::span<const double> values);

// The b - 1 interior cut points mean + (k - center + 0.5) * std for
// k = 1..b-1. Bin s covers (cut[s-2], cut[s-1]] intersected with the domain.
std::vector<double> bin_cuts(const FeatureStats& stats, const BinSpec& spec);

// All b intervals in bin order, empty ones flagged. A constant feature
// (std == 0) gets a single interval [min, max] at the center bin.
std::vector<BinInterval> subdomain_bounds(const FeatureStats& stats,
                                          const BinSpec& spec);

// Bin number of x among `intervals` (as returned by subdomain_bounds), or
// kOutOfDomain when no non-empty interval contains it.
BinNumber map_value(double x, std::span<const BinInterval> intervals);

// Same result as map_value(x, subdomain_bounds(stats, spec)) using the
// precomputed cut points; this is the hot path for projection.
BinNumber map_value(double x, const FeatureStats& stats,
                    std::span<const double> cuts, const BinSpec& spec);

}  // namespace spata

#endif  // SPATA_BINNING_H_
