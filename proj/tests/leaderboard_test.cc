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
#include <cmath>

#include "arena/leaderboard.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace arena {
namespace {

using ::arena::testing::AddMatches;

BtFit HandFit(std::vector<double> elo, std::vector<std::optional<Interval>> ci) {
  BtFit f;
  for (size_t i = 0; i < elo.size(); ++i) f.models.push_back(std::string(1, char('a' + i)));
  f.baseline = "a";
  f.elo = std::move(elo);
  f.coefficients.assign(f.elo.size(), 0.0);
  f.ci95 = std::move(ci);
  f.n_matches.assign(f.elo.size(), 10.0);
  f.win_rate.assign(f.elo.size(), 0.5);
  return f;
}

TEST(RankRowsTest, RankCountsIntervalsStrictlyAbove) {
  // a has no interval and ranks on its point estimate.
  const BtFit f = HandFit({1000, 1040, 1100, 1010},
                          {std::nullopt, Interval{1020, 1060}, Interval{1090, 1110},
                           Interval{995, 1025}});
  const auto rows = RankRows(f, {});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].model_id, "c");
  EXPECT_EQ(rows[0].rank, 1);
  EXPECT_EQ(rows[1].model_id, "b");
  EXPECT_EQ(rows[1].rank, 2);
  EXPECT_EQ(rows[2].model_id, "d");
  EXPECT_EQ(rows[2].rank, 2);  // b's low 1020 is not above d's high 1025
  EXPECT_EQ(rows[3].model_id, "a");
  EXPECT_EQ(rows[3].rank, 3);  // point 1000: b and c lie above, d does not
}

TEST(RankRowsTest, EqualEloOrdersByModelId) {
  const auto rows = RankRows(HandFit({1000, 1000}, {std::nullopt, std::nullopt}), {});
  EXPECT_EQ(rows[0].model_id, "a");
  EXPECT_EQ(rows[0].rank, 1);
  EXPECT_EQ(rows[1].rank, 1);
}

TEST(EligibilityTest, SingleMatchDeltaClosedForm) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 75);
  AddMatches(ms, "a", "b", Outcome::kRightWins, 25);
  const OutcomeTable t = BuildOutcomeTable(ms);
  FitOptions o;
  o.reg = 0.0;
  o.gradient_tolerance = 1e-11;
  const BtFit fit = FitBt(t, "b", o);
  EXPECT_NEAR(SingleMatchDelta(t, fit, "a", o), kEloScale * std::log(76.0 / 25 / 3.0), 1e-7);
  // Baseline: b gains a win, so a's ELO moves by the opponent change.
  EXPECT_NEAR(SingleMatchDelta(t, fit, "b", o), kEloScale * std::log(3.0 / (75.0 / 26)), 1e-7);
}

TEST(EligibilityTest, ReasonsReported) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 6);
  AddMatches(ms, "a", "b", Outcome::kRightWins, 4);
  const OutcomeTable t = BuildOutcomeTable(ms);
  const BtFit fit = FitBt(t, "b");
  const EligibilityReport a = Eligibility(t, fit, "a");
  EXPECT_FALSE(a.eligible);
  EXPECT_EQ(a.reasons, (std::vector<std::string>{"ci_unavailable", "single_match_delta"}));
  const EligibilityReport b = Eligibility(t, fit, "b");
  EXPECT_EQ(b.ci_width, 0.0);
  EXPECT_EQ(b.reasons, std::vector<std::string>{"single_match_delta"});
}

TEST(ComputeLeaderboardTest, LargeSampleIsEligibleAndDeterministic) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 4000);
  AddMatches(ms, "a", "b", Outcome::kRightWins, 3500);
  AddMatches(ms, "b", "c", Outcome::kLeftWins, 3800);
  AddMatches(ms, "b", "c", Outcome::kRightWins, 3700);
  const OutcomeTable t = BuildOutcomeTable(ms);
  LeaderboardOptions o;
  o.bootstrap.rounds = 200;
  o.bootstrap.seed = 9;
  const Leaderboard lb = ComputeLeaderboard(t, "b", o);
  ASSERT_EQ(lb.rows.size(), 3u);
  EXPECT_EQ(lb.rows[0].model_id, "a");
  EXPECT_EQ(lb.eligibility[0].model_id, "a");
  for (const auto& e : lb.eligibility) {
    EXPECT_TRUE(e.eligible) << e.model_id << " " << ToJson(e).dump();
  }
  EXPECT_TRUE(lb.rows[0].ci_low.has_value());
  const Json j = LeaderboardJson(lb.rows);
  EXPECT_TRUE(j[0]["n_matches"].is_number_integer());
  EXPECT_EQ(j[0]["n_matches"], 7500);
  EXPECT_EQ(j.dump(), LeaderboardJson(ComputeLeaderboard(t, "b", o).rows).dump());
}

TEST(ComputeLeaderboardTest, WithoutBootstrapRowsHaveNullIntervals) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 5);
  AddMatches(ms, "b", "a", Outcome::kLeftWins, 5);
  LeaderboardOptions o;
  o.with_bootstrap = false;
  const Json j = LeaderboardJson(ComputeLeaderboard(BuildOutcomeTable(ms), "a", o).rows);
  EXPECT_TRUE(j[0]["ci_low"].is_null());
  EXPECT_EQ(j[0].size(), 8u);
}

}  // namespace
}  // namespace arena
