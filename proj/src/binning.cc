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

#include <algorithm>
#include <cmath>
#include <string>

#include "spata/errors.h"

namespace spata {

BinSpec::BinSpec(int bins) : bins_(bins) {
  if (bins < 3 || bins % 2 == 0) {
    throw ConfigError("bins must be odd and >= 3 (got " +
                      std::to_string(bins) + ")");
  }
}

FeatureStats feature_stats(std::span<const double> values) {
  if (values.empty()) {
    throw DataError("cannot compute statistics of an empty vector");
  }
  FeatureStats stats;
  stats.count = values.size();
  stats.min = values[0];
  stats.max = values[0];
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DataError("non-finite value in feature vector");
    }
    stats.min = std::min(stats.min, v);
    stats.max = std::max(stats.max, v);
    sum += v;
  }
  const double n = static_cast<double>(values.size());
  if (stats.min == stats.max) {
    // Rounding in sum / n must not invent spread for a constant vector.
    stats.mean = stats.min;
    stats.std = 0.0;
    return stats;
  }
  stats.mean = std::clamp(sum / n, stats.min, stats.max);
  double squares = 0.0;
  for (double v : values) {
    const double d = v - stats.mean;
    squares += d * d;
  }
  stats.std = std::sqrt(squares / n);
  return stats;
}

std::vector<double> bin_cuts(const FeatureStats& stats, const BinSpec& spec) {
  std::vector<double> cuts(static_cast<std::size_t>(spec.bins() - 1));
  for (int k = 1; k < spec.bins(); ++k) {
    const double offset = static_cast<double>(k - spec.center()) + 0.5;
    cuts[static_cast<std::size_t>(k - 1)] = stats.mean + offset * stats.std;
  }
  return cuts;
}

std::vector<BinInterval> subdomain_bounds(const FeatureStats& stats,
                                          const BinSpec& spec) {
  const int b = spec.bins();
  std::vector<BinInterval> intervals(static_cast<std::size_t>(b));
  for (int s = 1; s <= b; ++s) {
    intervals[static_cast<std::size_t>(s - 1)].bin =
        static_cast<BinNumber>(s);
  }

  if (stats.std == 0.0) {
    BinInterval& only = intervals[static_cast<std::size_t>(spec.center() - 1)];
    only.lower = stats.min;
    only.upper = stats.max;
    only.lower_open = false;
    only.empty = false;
    return intervals;
  }

  const std::vector<double> cuts = bin_cuts(stats, spec);
  for (int s = 1; s <= b; ++s) {
    BinInterval& iv = intervals[static_cast<std::size_t>(s - 1)];
    const bool has_lower_cut = s > 1;
    const bool has_upper_cut = s < b;
    const double lo = has_lower_cut ? cuts[static_cast<std::size_t>(s - 2)]
                                    : stats.min;
    const double hi = has_upper_cut ? cuts[static_cast<std::size_t>(s - 1)]
                                    : stats.max;

    // (lo, hi] meets [min, max] iff hi >= min and lo < max.
    if (has_upper_cut && hi < stats.min) continue;
    if (has_lower_cut && lo >= stats.max) continue;

    if (!has_lower_cut || lo < stats.min) {
      iv.lower = stats.min;
      iv.lower_open = false;
    } else {
      iv.lower = lo;
      iv.lower_open = true;
    }
    iv.upper = std::min(hi, stats.max);
    iv.empty = false;
  }
  return intervals;
}

BinNumber map_value(double x, std::span<const BinInterval> intervals) {
  if (!std::isfinite(x)) return kOutOfDomain;
  for (const BinInterval& iv : intervals) {
    if (iv.contains(x)) return iv.bin;
  }
  return kOutOfDomain;
}

BinNumber map_value(double x, const FeatureStats& stats,
                    std::span<const double> cuts, const BinSpec& spec) {
  // NaN fails both comparisons below, so test finiteness first.
  if (!std::isfinite(x) || x < stats.min || x > stats.max) {
    return kOutOfDomain;
  }
  if (stats.std == 0.0) return static_cast<BinNumber>(spec.center());
  const auto below = std::lower_bound(cuts.begin(), cuts.end(), x);
  return static_cast<BinNumber>(1 + (below - cuts.begin()));
}

}  // namespace spata
