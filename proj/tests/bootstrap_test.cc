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
#include <algorithm>
#include <cmath>
#include <random>

#include "arena/bootstrap.h"
#include "arena/error.h"
#include "arena/stats.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace arena {
namespace {

using ::arena::testing::AddMatches;

std::vector<MatchRecord> TwoModel(int wins, int losses) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, wins);
  AddMatches(ms, "a", "b", Outcome::kRightWins, losses);
  return ms;
}

BootstrapOptions Options(int rounds, uint64_t seed) {
  BootstrapOptions o;
  o.rounds = rounds;
  o.seed = seed;
  return o;
}

TEST(BootstrapTest, RejectsTooFewRounds) {
  const OutcomeTable t = BuildOutcomeTable(TwoModel(30, 10));
  try {
    BootstrapTable(t, "b", Options(99, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(BootstrapTable(t, "zz", Options(100, 1)), Error);
}

TEST(BootstrapTest, DeterministicAcrossRunsAndThreads) {
  std::vector<MatchRecord> ms = TwoModel(40, 25);
  AddMatches(ms, "b", "c", Outcome::kLeftWins, 30);
  AddMatches(ms, "c", "a", Outcome::kBothGood, 12);
  AddMatches(ms, "c", "a", Outcome::kLeftWins, 9);
  const OutcomeTable t = BuildOutcomeTable(ms);
  const BootstrapResult one = BootstrapTable(t, "b", Options(200, 42));
  BootstrapOptions threaded = Options(200, 42);
  threaded.num_threads = 4;
  const BootstrapResult four = BootstrapTable(t, "b", threaded);
  EXPECT_EQ(one.elo_samples, four.elo_samples);
  EXPECT_EQ(one.elo_samples, BootstrapTable(t, "b", Options(200, 42)).elo_samples);
  EXPECT_NE(one.elo_samples, BootstrapTable(t, "b", Options(200, 43)).elo_samples);
}

TEST(BootstrapTest, BaselineExcludedAndIntervalsContainEstimate) {
  std::vector<MatchRecord> ms = TwoModel(60, 40);
  AddMatches(ms, "b", "c", Outcome::kLeftWins, 55);
  AddMatches(ms, "c", "b", Outcome::kLeftWins, 45);
  const auto ci = BootstrapCi(ms, "b", Options(300, 5));
  EXPECT_EQ(ci.count("b"), 0u);
  ASSERT_EQ(ci.size(), 2u);
  const BtFit fit = FitBt(BuildOutcomeTable(ms), "b");
  for (const auto& [m, iv] : ci) {
    EXPECT_LT(iv.low, fit.Elo(m));
    EXPECT_GT(iv.high, fit.Elo(m));
  }
}

TEST(BootstrapTest, AgreesWithMatchIndexResampling) {
  // Oracle: resample match indices directly and use the two-model closed
  // form xi = ln(k / (n - k)).
  const int wins = 300, n = 400, rounds = 4000;
  const std::vector<MatchRecord> ms = TwoModel(wins, n - wins);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<double> oracle;
  for (int r = 0; r < rounds; ++r) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += pick(rng) < wins ? 1 : 0;
    oracle.push_back(kBaselineElo + kEloScale * std::log(double(k) / (n - k)));
  }
  BootstrapOptions o = Options(rounds, 8);
  o.fit.reg = 0.0;
  const Interval iv = BootstrapCi(ms, "b", o).at("a");
  // Endpoints are order statistics of a discrete law; one step of k is
  // about 2.6 ELO here.
  EXPECT_NEAR(iv.low, Percentile(oracle, 0.025), 8.0);
  EXPECT_NEAR(iv.high, Percentile(oracle, 0.975), 8.0);
}

TEST(BootstrapTest, WidthShrinksWithMoreData) {
  const auto small = BootstrapCi(TwoModel(60, 40), "b", Options(300, 1)).at("a");
  const auto large = BootstrapCi(TwoModel(600, 400), "b", Options(300, 1)).at("a");
  EXPECT_LT(large.width(), small.width() * 0.5);
}

TEST(BootstrapTest, RedrawsDisconnectedResamples) {
  // a-b has one match; many resamples drop it, disconnecting a from c.
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kBothGood, 1);
  AddMatches(ms, "b", "c", Outcome::kLeftWins, 3);
  AddMatches(ms, "c", "b", Outcome::kLeftWins, 3);
  BootstrapOptions o = Options(100, 2);
  o.max_redraws = 0;
  EXPECT_THROW(BootstrapCi(ms, "b", o), Error);
}

}  // namespace
}  // namespace arena
