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

// Per-prompt ELO decomposition.
//
// For prompt i the full match schedule is kept, but every match on another
// prompt is replaced by a tie before refitting. The contribution of prompt i
// to a model is that refit's ELO minus the 1000 anchor; summed over prompts
// the contributions approximately reconstruct the model's full deviation
// from the baseline.

#ifndef ARENA_PROMPT_ELO_H_
#define ARENA_PROMPT_ELO_H_

#include <optional>
#include <span>
#include <vector>

#include "arena/json_io.h"
#include "arena/rating.h"

namespace arena {

struct PromptContribution {
  PromptId prompt_id;
  ModelId model_id;
  double delta_elo = 0.0;
};

struct PromptDecomposition {
  ModelId model_id;
  std::vector<PromptContribution> contributions;  // ordered by prompt_id
  double full_delta = 0.0;  // ELO(full) - 1000
  double sum_delta = 0.0;   // sum of contributions
  // |sum_delta - full_delta| / |full_delta|; absent when full_delta == 0.
  std::optional<double> reconstruction_error;
};

// Decomposition for every model in one pass (one refit per prompt).
std::vector<PromptDecomposition> PromptEloContributionsAll(
    std::span<const MatchRecord> matches, const ModelId& baseline,
    const FitOptions& options = {}, const MatchFilter& filter = ExcludeAnchors());

// Throws kNotFound when `model` has no matches.
PromptDecomposition PromptEloContributions(
    std::span<const MatchRecord> matches, const ModelId& baseline,
    const ModelId& model, const FitOptions& options = {},
    const MatchFilter& filter = ExcludeAnchors());

// {model_id, full_delta, sum_delta, reconstruction_error|null,
//  contributions: [{prompt_id, delta_elo}]}
Json ToJson(const PromptDecomposition& d);

}  // namespace arena

#endif  // ARENA_PROMPT_ELO_H_
