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

// Percentile bootstrap confidence intervals for ELO scores.

#ifndef ARENA_BOOTSTRAP_H_
#define ARENA_BOOTSTRAP_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "arena/rating.h"

namespace arena {

struct BootstrapOptions {
  int rounds = 1000;  // B, at least 100
  uint64_t seed = 0;
  FitOptions fit;
  double confidence = 0.95;
  int max_redraws = 10;
  // Resamples are independent streams merged by index, so the result does
  // not depend on the thread count.
  int num_threads = 1;
};

struct BootstrapResult {
  std::vector<ModelId> models;
  // elo_samples[r][i]: ELO of models[i] in resample r.
  std::vector<std::vector<double>> elo_samples;
  std::map<ModelId, Interval> ci;  // baseline excluded
};

// Resamples the matches accepted by the table (same size, with replacement),
// refits each resample and takes percentile intervals per model. A resample
// whose comparison graph is disconnected is redrawn up to max_redraws times
// before kConnectivity is thrown.
//
// Only the outcome counts of a resample enter the fit, so a resample is
// drawn as a multinomial over (pair, outcome) cells with the observed
// frequencies; this has exactly the distribution of drawing match indices
// with replacement.
BootstrapResult BootstrapTable(const OutcomeTable& table, const ModelId& baseline,
                               const BootstrapOptions& options);

std::map<ModelId, Interval> BootstrapCi(std::span<const MatchRecord> matches,
                                        const ModelId& baseline,
                                        const BootstrapOptions& options,
                                        const MatchFilter& filter = ExcludeAnchors());

}  // namespace arena

#endif  // ARENA_BOOTSTRAP_H_
