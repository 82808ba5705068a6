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

#include "arena/benchmark.h"
#include "arena/error.h"
#include "arena/rating.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace arena {
namespace {

using ::arena::testing::AddMatches;
using ::arena::testing::Match;

constexpr double kNoReg = 0.0;

FitOptions Unpenalized() {
  FitOptions o;
  o.reg = kNoReg;
  o.gradient_tolerance = 1e-11;
  return o;
}

// Minorization-maximization for the unpenalized model, written without
// Eigen or Newton steps: p_i <- W_i / sum_j n_ij / (p_i + p_j).
std::vector<double> MmStrengths(const std::vector<std::vector<double>>& w) {
  const size_t n = w.size();
  std::vector<double> p(n, 1.0);
  for (int iter = 0; iter < 200000; ++iter) {
    std::vector<double> next(n);
    double delta = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double won = 0.0, denom = 0.0;
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        won += w[i][j];
        denom += (w[i][j] + w[j][i]) / (p[i] + p[j]);
      }
      next[i] = won / denom;
    }
    const double scale = next[0];
    for (size_t i = 0; i < n; ++i) {
      next[i] /= scale;
      delta = std::max(delta, std::abs(std::log(next[i] / p[i])));
    }
    p = next;
    if (delta < 1e-14) break;
  }
  return p;
}

TEST(BuildOutcomeTableTest, CountsWinsAndTies) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "b", "a", Outcome::kLeftWins, 3);
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 1);
  AddMatches(ms, "a", "b", Outcome::kBothGood, 2);
  AddMatches(ms, "b", "a", Outcome::kBothBad, 1);
  AddMatches(ms, "c", "a", Outcome::kRightWins, 4);
  const OutcomeTable t = BuildOutcomeTable(ms);
  ASSERT_EQ(t.models, (std::vector<ModelId>{"a", "b", "c"}));
  EXPECT_EQ(t.wins(1, 0), 3);
  EXPECT_EQ(t.wins(0, 1), 1);
  EXPECT_EQ(t.ties(0, 1), 3);
  EXPECT_EQ(t.ties(1, 0), 3);
  EXPECT_EQ(t.wins(0, 2), 4);
  EXPECT_EQ(t.Played(0), 11);
  // (W + 0.5 T) / N for "a": (5 + 1.5) / 11.
  EXPECT_DOUBLE_EQ(WinRate(t, "a"), 6.5 / 11.0);
}

TEST(BuildOutcomeTableTest, FiltersAndSeededModels) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 2);
  ms.back().is_anchor = true;
  ms.push_back(Match("x", "a", "b", Outcome::kLeftWins, "p1", "cheat"));
  const std::vector<ModelId> seed = {"z"};
  const OutcomeTable t =
      BuildOutcomeTable(ms, AllOf({ExcludeAnchors(), ExcludeEvaluators({"cheat"})}), seed);
  EXPECT_EQ(t.models, (std::vector<ModelId>{"a", "b", "z"}));
  EXPECT_EQ(t.wins(0, 1), 1);
  EXPECT_THROW(WinRate(t, "z"), Error);
  EXPECT_THROW(WinRate(t, "q"), Error);
}

TEST(BuildOutcomeTableTest, ScenarioFilterUsesBenchmark) {
  PromptItem film;
  film.prompt_id = "pf";
  film.text = "x";
  film.scenario_label = Scenario::kFilm;
  film.capability_labels = {Capability::kStyle};
  PromptItem art = film;
  art.prompt_id = "pa";
  art.scenario_label = Scenario::kArt;
  const Benchmark bench({film, art});
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 2, "pf");
  AddMatches(ms, "a", "b", Outcome::kRightWins, 5, "pa");
  AddMatches(ms, "a", "b", Outcome::kRightWins, 7, "unknown");
  const OutcomeTable t = BuildOutcomeTable(ms, InScenario(bench, Scenario::kFilm));
  EXPECT_EQ(t.wins(0, 1), 2);
  EXPECT_EQ(t.wins(1, 0), 0);
}

TEST(FitBtTest, TwoModelClosedForm) {
  // 75 wins against 25 losses: xi = ln 3.
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 75);
  AddMatches(ms, "a", "b", Outcome::kRightWins, 25);
  const BtFit fit = FitBt(BuildOutcomeTable(ms), "b", Unpenalized());
  EXPECT_NEAR(fit.Coefficient("a"), std::log(3.0), 1e-9);
  EXPECT_NEAR(fit.Elo("a") - fit.Elo("b"), 400.0 * std::log10(3.0), 1e-7);
  EXPECT_EQ(fit.Elo("b"), 1000.0);
}

TEST(FitBtTest, TiesCountAsHalfWins) {
  // 50 wins, 0 losses, 100 ties: effective 100 vs 50, xi = ln 2.
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 50);
  AddMatches(ms, "a", "b", Outcome::kBothGood, 60);
  AddMatches(ms, "b", "a", Outcome::kBothBad, 40);
  const BtFit fit = FitBt(BuildOutcomeTable(ms), "b", Unpenalized());
  EXPECT_NEAR(fit.Coefficient("a"), std::log(2.0), 1e-9);
  EXPECT_NEAR(fit.win_rate[fit.Index("a")], 100.0 / 150.0, 1e-12);
}

TEST(FitBtTest, MatchesMinorizationMaximization) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> count(1, 40);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + trial % 2;
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    std::vector<ModelId> models;
    for (int i = 0; i < n; ++i) models.push_back("m" + std::to_string(i));
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) w[i][j] = weights(i, j) = count(rng);
      }
    }
    const std::vector<double> p = MmStrengths(w);
    const BtFit fit = FitBtWeighted(models, weights, "m0", Unpenalized());
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(fit.coefficients[i], std::log(p[i]), 1e-6) << "trial " << trial;
    }
  }
}

TEST(FitBtTest, BaselineIsExactlyOneThousand) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 30);
  AddMatches(ms, "b", "c", Outcome::kLeftWins, 20);
  AddMatches(ms, "c", "a", Outcome::kLeftWins, 9);
  const OutcomeTable t = BuildOutcomeTable(ms);
  for (const ModelId& base : t.models) {
    const BtFit fit = FitBt(t, base);
    EXPECT_EQ(fit.Elo(base), 1000.0);
    EXPECT_EQ(fit.Coefficient(base), 0.0);
  }
}

TEST(FitBtTest, DifferencesInvariantToBaselineWithDefaultPenalty) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> count(0, 25);
  const int n = 6;
  std::vector<ModelId> models;
  for (int i = 0; i < n; ++i) models.push_back("m" + std::to_string(i));
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) w(i, j) = count(rng);
    }
  }
  w(0, 5) = 0;  // m5 never loses to m0, still connected
  const BtFit ref = FitBtWeighted(models, w, "m0");
  for (const ModelId& base : models) {
    const BtFit fit = FitBtWeighted(models, w, base);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        EXPECT_NEAR(fit.elo[a] - fit.elo[b], ref.elo[a] - ref.elo[b], 1e-6);
      }
    }
  }
}

TEST(FitBtTest, InvariantToMatchOrderAndSideSwap) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 17);
  AddMatches(ms, "b", "c", Outcome::kRightWins, 8);
  AddMatches(ms, "c", "a", Outcome::kBothGood, 5);
  AddMatches(ms, "a", "c", Outcome::kRightWins, 12);
  AddMatches(ms, "b", "a", Outcome::kLeftWins, 6);
  const BtFit ref = FitBt(BuildOutcomeTable(ms), "a");

  std::vector<MatchRecord> swapped = ms;
  for (MatchRecord& m : swapped) {
    std::swap(m.model_left, m.model_right);
    std::swap(m.image_left, m.image_right);
    if (m.outcome == Outcome::kLeftWins) {
      m.outcome = Outcome::kRightWins;
    } else if (m.outcome == Outcome::kRightWins) {
      m.outcome = Outcome::kLeftWins;
    }
  }
  std::shuffle(swapped.begin(), swapped.end(), std::mt19937_64(1));
  const BtFit fit = FitBt(BuildOutcomeTable(swapped), "a");
  for (size_t i = 0; i < ref.elo.size(); ++i) EXPECT_NEAR(fit.elo[i], ref.elo[i], 1e-9);
}

TEST(FitBtTest, GradientMatchesFiniteDifferences) {
  Eigen::MatrixXd w(3, 3);
  w << 0, 5, 2.5, 3, 0, 7, 1, 4.5, 0;
  Eigen::VectorXd xi(3);
  xi << 0.3, -0.2, 0.7;
  const double reg = 0.05;
  const Eigen::VectorXd g = BtGradient(w, xi, reg);
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd up = xi, down = xi;
    up[k] += h;
    down[k] -= h;
    const double fd = (BtLogLikelihood(w, up, reg) - BtLogLikelihood(w, down, reg)) / (2 * h);
    EXPECT_NEAR(g[k], fd, 1e-6);
  }
}

TEST(FitBtTest, GradientVanishesAtOptimum) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 10);
  AddMatches(ms, "b", "c", Outcome::kLeftWins, 10);
  AddMatches(ms, "c", "a", Outcome::kLeftWins, 3);
  const BtFit fit = FitBt(BuildOutcomeTable(ms), "a");
  EXPECT_LT(fit.max_gradient, 1e-8);
  const Eigen::Map<const Eigen::VectorXd> xi(fit.coefficients.data(), 3);
  const Eigen::VectorXd g = BtGradient(BuildOutcomeTable(ms).DirectedWeights(), xi, 1e-4);
  EXPECT_LT(g.lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(FitBtTest, DisconnectedGraphNamesComponents) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 3);
  AddMatches(ms, "c", "d", Outcome::kLeftWins, 3);
  try {
    FitBt(BuildOutcomeTable(ms), "a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConnectivity);
    EXPECT_NE(std::string(e.what()).find("{c, d}"), std::string::npos) << e.what();
  }
}

TEST(FitBtTest, SeparationNeedsPenalty) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 10);
  AddMatches(ms, "b", "c", Outcome::kBothGood, 4);
  const OutcomeTable t = BuildOutcomeTable(ms);
  try {
    FitBt(t, "b", Unpenalized());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonConvergence);
  }
  const BtFit fit = FitBt(t, "b");
  EXPECT_TRUE(std::isfinite(fit.Elo("a")));
  EXPECT_GT(fit.Elo("a"), 1000.0);
}

TEST(FitBtTest, UnknownBaselineAndNegativePenalty) {
  std::vector<MatchRecord> ms;
  AddMatches(ms, "a", "b", Outcome::kLeftWins, 3);
  AddMatches(ms, "b", "a", Outcome::kLeftWins, 3);
  const OutcomeTable t = BuildOutcomeTable(ms);
  try {
    FitBt(t, "zz");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  FitOptions bad;
  bad.reg = -1.0;
  EXPECT_THROW(FitBt(t, "a", bad), Error);
  EXPECT_THROW(FitBt(t, "a").Elo("zz"), Error);
}

TEST(FitBtTest, RecoversPlantedOrdering) {
  // Property: with plenty of data the planted order is recovered.
  const std::vector<double> truth = {0.0, 0.4, 0.9, 1.3};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MatchRecord> ms;
  for (int k = 0; k < 8000; ++k) {
    const int a = k % 4, b = (k / 4 + 1 + a) % 4;
    if (a == b) continue;
    const double p = 1.0 / (1.0 + std::exp(truth[b] - truth[a]));
    const std::string ma = "m" + std::to_string(a), mb = "m" + std::to_string(b);
    ms.push_back(Match("x" + std::to_string(k), ma, mb,
                       u(rng) < p ? Outcome::kLeftWins : Outcome::kRightWins));
  }
  const BtFit fit = FitBt(BuildOutcomeTable(ms), "m0");
  for (int i = 1; i < 4; ++i) {
    EXPECT_GT(fit.elo[i], fit.elo[i - 1]);
    EXPECT_NEAR(fit.coefficients[i], truth[i], 0.12);
  }
}

}  // namespace
}  // namespace arena
