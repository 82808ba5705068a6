// Copyright 2026 The Arena Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARENA_STATS_H_
#define ARENA_STATS_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace arena {

inline double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
inline double LogSigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double Logit(double p) { return std::log(p / (1.0 - p)); }

double NormalCdf(double z);
// Two-sided p-value for a standard normal statistic.
double TwoSidedNormalP(double z);

// Linear-interpolation percentile (q in [0,1]) of an unsorted sample.
double Percentile(std::vector<double> values, double q);

double Mean(std::span<const double> x);
// Unbiased (n-1) sample variance; 0 for n < 2.
double SampleVariance(std::span<const double> x);
// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> Pearson(std::span<const double> x, std::span<const double> y);

// Kendall tau-a between two paired samples.
double KendallTau(std::span<const double> x, std::span<const double> y);

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for the index-th task derived from `seed`.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t index) {
  return SplitMix64(SplitMix64(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

}  // namespace arena

#endif  // ARENA_STATS_H_
