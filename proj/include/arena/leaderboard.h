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

// Leaderboard rows and listing eligibility.

#ifndef ARENA_LEADERBOARD_H_
#define ARENA_LEADERBOARD_H_

#include <optional>
#include <string>
#include <vector>

#include "arena/bootstrap.h"
#include "arena/json_io.h"
#include "arena/rating.h"

namespace arena {

struct EligibilityOptions {
  double ci_max = 20.0;    // ELO points
  double delta_max = 3.0;  // ELO points
  FitOptions fit;
};

struct EligibilityReport {
  ModelId model_id;
  bool eligible = false;
  // Absent when no interval is known for a non-baseline model.
  std::optional<double> ci_width;
  double single_match_delta = 0.0;
  double n_matches = 0.0;
  std::vector<std::string> reasons;  // "ci_width", "single_match_delta", "ci_unavailable"
};

// Single-match sensitivity: refit `table` with one extra win of `model`
// over its nearest-rated opponent and return the absolute ELO change of
// `model`. For the baseline, whose ELO is pinned, the opponent's change is
// returned instead.
double SingleMatchDelta(const OutcomeTable& table, const BtFit& fit,
                        const ModelId& model, const FitOptions& options = {});

// The baseline's interval is degenerate (its ELO is fixed), so its width
// counts as 0.
EligibilityReport Eligibility(const OutcomeTable& table, const BtFit& fit,
                              const ModelId& model,
                              const EligibilityOptions& options = {});

struct LeaderboardRow {
  ModelId model_id;
  double elo = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  int rank = 0;
  double n_matches = 0.0;
  double win_rate = 0.0;
  bool eligible = false;
};

struct LeaderboardOptions {
  BootstrapOptions bootstrap;
  EligibilityOptions eligibility;
  bool with_bootstrap = true;
};

struct Leaderboard {
  BtFit fit;
  std::vector<LeaderboardRow> rows;  // ELO descending, ties by model_id
  std::vector<EligibilityReport> eligibility;  // same order as rows
};

// Rank is 1 + the number of models whose interval lies entirely above this
// model's interval; models without an interval use their point estimate.
std::vector<LeaderboardRow> RankRows(const BtFit& fit,
                                     const std::vector<EligibilityReport>& reports);

// Fit, bootstrap (fit.ci95 is filled) and eligibility in one call.
Leaderboard ComputeLeaderboard(const OutcomeTable& table, const ModelId& baseline,
                               const LeaderboardOptions& options = {});

Json ToJson(const LeaderboardRow& row);
Json ToJson(const EligibilityReport& report);
Json LeaderboardJson(const std::vector<LeaderboardRow>& rows);

}  // namespace arena

#endif  // ARENA_LEADERBOARD_H_
