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
#include <random>
#include <sstream>

#include "arena/error.h"
#include "arena/json_io.h"
#include "arena/quality_control.h"
#include "arena/rating.h"
#include "arena/simulator.h"
#include "arena/stats.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace arena {
namespace {

using ::arena::testing::DataPath;

std::string Dump(const std::vector<MatchRecord>& ms) {
  std::ostringstream out;
  for (const MatchRecord& m : ms) out << ToJson(m).dump() << "\n";
  return out.str();
}

TEST(DrawOutcomeTest, ExpectedScoreMatchesLogistic) {
  // 200 ELO points: p = 1 / (1 + 10^-0.5) = 0.7597.
  const double delta = 200.0 / kEloScale;
  const double p = 1.0 / (1.0 + std::pow(10.0, -0.5));
  std::mt19937_64 rng(3);
  const int n = 100000;
  double score = 0.0;
  int ties = 0;
  for (int i = 0; i < n; ++i) {
    switch (DrawOutcome(delta, 0.1, rng)) {
      case Outcome::kLeftWins: score += 1.0; break;
      case Outcome::kRightWins: break;
      default:
        score += 0.5;
        ++ties;
    }
  }
  EXPECT_NEAR(score / n, p, 0.005);
  EXPECT_NEAR(ties / double(n), 0.1, 0.005);
}

TEST(DrawOutcomeTest, TieRateCappedForLopsidedPairs) {
  std::mt19937_64 rng(5);
  int ties = 0;
  for (int i = 0; i < 100000; ++i) ties += IsTie(DrawOutcome(5.0, 0.5, rng));
  // 2 * sigmoid(-5) = 0.0134.
  EXPECT_NEAR(ties / 100000.0, 2.0 / (1.0 + std::exp(5.0)), 0.002);
}

TEST(SimConfigTest, ValidatesFields) {
  EXPECT_THROW(SimConfigFromJson(Json::array()), Error);
  EXPECT_THROW(SimConfigFromJson(Json{{"models", Json::array()}}), Error);
  Json j = Json::parse(R"({"models": [{"model_id": "a"}, {"model_id": "b", "elo": 900}]})");
  const SimConfig c = SimConfigFromJson(j);
  EXPECT_TRUE(c.models[1].is_baseline);  // lowest planted ELO
  j["evaluators"] = Json::parse(R"([{"cheater": "sneaky"}])");
  EXPECT_THROW(SimConfigFromJson(j), Error);
  j["evaluators"] = Json::parse(R"([{"increments": [10, 20]}])");
  EXPECT_THROW(SimConfigFromJson(j), Error);
  j["evaluators"] = Json::parse(R"([{"increments": [12.5, 0, 0]}])");
  EXPECT_NEAR(SimConfigFromJson(j).evaluators[0].beta[0], std::log(0.625 / 0.375), 1e-12);
  EXPECT_NO_THROW(LoadSimConfig(DataPath("sim_small.json")));
  EXPECT_NO_THROW(LoadSimConfig(DataPath("sim_twelve.json")));
}

TEST(BuildWorldTest, PlantedStructure) {
  SimConfig c = LoadSimConfig(DataPath("sim_small.json"));
  c.prompt_offset_sd = 30.0;
  const SimWorld w = BuildWorld(c);
  EXPECT_EQ(w.baseline, "m_base");
  EXPECT_EQ(w.xi.at("m_base"), 0.0);
  EXPECT_NEAR(w.xi.at("m_gamma"), 240.0 / kEloScale, 1e-12);
  EXPECT_EQ(w.benchmark.size(), 40u);
  EXPECT_GE(w.anchors.size(), 8u);  // duplicate draws are dropped
  EXPECT_LE(w.anchors.size(), 10u);
  for (const ModelEntry& m : w.models) {
    double sum = 0.0;
    for (const auto& [prompt, by_model] : w.offsets) sum += by_model.at(m.model_id);
    EXPECT_NEAR(sum, 0.0, 1e-9);
    EXPECT_EQ(w.images.Samples(m.model_id, "p0001").size(), 4u);
  }
  for (const AnchorPair& a : w.anchors) {
    EXPECT_EQ(w.images.Find(a.image_good)->model_id, "m_gamma");
    EXPECT_EQ(w.images.Find(a.image_bad)->model_id, "m_base");
  }
  EXPECT_EQ(w.profiles.size(), 10u);
}

TEST(SimulateTournamentTest, ByteIdenticalForFixedSeed) {
  const SimConfig c = LoadSimConfig(DataPath("sim_small.json"));
  const SimWorld w1 = BuildWorld(c), w2 = BuildWorld(c);
  const std::string a = Dump(SimulateTournament(c, w1));
  EXPECT_EQ(a, Dump(SimulateTournament(c, w2)));
  SimConfig other = c;
  other.seed = 8;
  other.scheduler.seed = 8;
  EXPECT_NE(a, Dump(SimulateTournament(other, BuildWorld(other))));

  std::vector<MosTriple> raw1, raw2;
  const auto m1 = SimulateMos(c, w1, &raw1);
  const auto m2 = SimulateMos(c, w2, &raw2);
  EXPECT_EQ(m1, m2);
  ASSERT_EQ(raw1.size(), m1.size());
  EXPECT_EQ(PlantedTruthJson(c, w1).dump(), PlantedTruthJson(c, w2).dump());
}

TEST(SimulateTournamentTest, RecoversPlantedOrderAndAnchorRate) {
  const SimConfig c = LoadSimConfig(DataPath("sim_small.json"));
  const SimWorld w = BuildWorld(c);
  const std::vector<MatchRecord> ms = SimulateTournament(c, w);
  ASSERT_EQ(ms.size(), 6000u);
  int anchors = 0;
  for (const MatchRecord& m : ms) anchors += m.is_anchor;
  EXPECT_NEAR(anchors / 6000.0, 0.05, 0.01);
  const BtFit fit = FitBt(BuildOutcomeTable(ms, ExcludeAnchors()), w.baseline);
  EXPECT_LT(fit.Elo("m_base"), fit.Elo("m_alpha"));
  EXPECT_LT(fit.Elo("m_alpha"), fit.Elo("m_beta"));
  EXPECT_LT(fit.Elo("m_beta"), fit.Elo("m_gamma"));
  EXPECT_NEAR(fit.Elo("m_gamma"), 1240.0, 25.0);
}

TEST(SimulateTournamentTest, CheatersLeaveTraces) {
  const SimConfig c = LoadSimConfig(DataPath("sim_twelve.json"));
  const SimWorld w = BuildWorld(c);
  const std::vector<MatchRecord> ms = SimulateTournament(c, w);
  const QcReport qc = RunQc(ms, w.anchors, w.profiles);
  std::map<EvaluatorId, size_t> index;
  for (size_t i = 0; i < w.profiles.size(); ++i) index[w.profiles[i].evaluator_id] = i;
  int caught = 0, cheaters = 0, false_flags = 0;
  for (const QcEvaluatorReport& r : qc.evaluators) {
    const auto it = index.find(r.evaluator_id);
    ASSERT_NE(it, index.end());
    const bool cheater = c.evaluators[w.evaluators[it->second].group].cheater !=
                         CheaterProfile::kNone;
    cheaters += cheater;
    if (cheater) caught += !r.flags.empty();
    if (!cheater) false_flags += !r.flags.empty();
  }
  EXPECT_EQ(cheaters, 5);
  EXPECT_EQ(caught, 5);
  EXPECT_EQ(false_flags, 0);
}

TEST(SimulateMosTest, MeansTrackPlantedQuality) {
  const SimConfig c = LoadSimConfig(DataPath("sim_small.json"));
  const SimWorld w = BuildWorld(c);
  std::vector<MosTriple> raw;
  const auto mos = SimulateMos(c, w, &raw);
  // Two expert raters score every image.
  EXPECT_EQ(mos.size(), 2u * w.true_quality.size());
  std::vector<double> truth, observed;
  for (size_t i = 0; i < mos.size(); ++i) {
    truth.push_back(w.true_quality.at(mos[i].image_id)[0]);
    observed.push_back(raw[i][0]);
    EXPECT_GE(mos[i].scores[0], 1);
    EXPECT_LE(mos[i].scores[0], 5);
  }
  double diff = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) diff += observed[i] - truth[i];
  EXPECT_NEAR(diff / truth.size(), 0.0, 0.05);
}

}  // namespace
}  // namespace arena
