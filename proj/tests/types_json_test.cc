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

#include <random>
#include <sstream>

#include "arena/error.h"
#include "arena/json_io.h"
#include "arena/stats.h"
#include "arena/types.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace arena {
namespace {

using ::arena::testing::Match;
using ::arena::testing::TempDir;

TEST(TimestampTest, FormatParseRoundTrip) {
  const auto t = ParseTimestamp("2026-03-14T15:09:26.535Z");
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(FormatTimestamp(*t), "2026-03-14T15:09:26.535Z");
  EXPECT_EQ(FormatTimestamp(*ParseTimestamp("2026-01-01T00:00:00Z")),
            "2026-01-01T00:00:00.000Z");
}

TEST(TimestampTest, RejectsMalformed) {
  EXPECT_FALSE(ParseTimestamp("yesterday").has_value());
  EXPECT_FALSE(ParseTimestamp("2026-02-30T00:00:00Z").has_value());
  EXPECT_FALSE(ParseTimestamp("2026-01-01T25:00:00Z").has_value());
}

TEST(EnumNamesTest, RoundTripEveryValue) {
  for (Outcome o : {Outcome::kLeftWins, Outcome::kRightWins, Outcome::kBothGood,
                    Outcome::kBothBad}) {
    EXPECT_EQ(ParseOutcome(OutcomeName(o)), o);
  }
  for (Scenario s : kAllScenarios) EXPECT_EQ(ParseScenario(ScenarioName(s)), s);
  for (int c = 0; c < kNumCapabilities; ++c) {
    const auto cap = static_cast<Capability>(c);
    EXPECT_EQ(ParseCapability(CapabilityName(cap)), cap);
  }
  for (Dimension d : kAllDimensions) EXPECT_EQ(ParseDimension(DimensionName(d)), d);
  EXPECT_FALSE(ParseOutcome("maybe").has_value());
}

TEST(MatchJsonTest, RoundTrip) {
  MatchRecord m = Match("m1", "a", "b", Outcome::kBothBad);
  m.submitted_at = *ParseTimestamp("2026-05-01T10:00:00.250Z");
  m.is_anchor = true;
  m.mode = Mode::kExpert;
  m.duration_s = 3.25;
  EXPECT_EQ(MatchFromJson(ToJson(m)), m);
}

TEST(MatchJsonTest, MissingFieldNamesIt) {
  Json j = ToJson(Match("m1", "a", "b", Outcome::kLeftWins));
  j.erase("outcome");
  try {
    MatchFromJson(j);
    FAIL() << "expected a schema error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
    EXPECT_NE(std::string(e.what()).find("outcome"), std::string::npos);
  }
}

TEST(MatchJsonTest, RejectsSelfMatch) {
  Json j = ToJson(Match("m1", "a", "b", Outcome::kLeftWins));
  j["model_right"] = "a";
  EXPECT_THROW(MatchFromJson(j), Error);
}

TEST(JsonlTest, ErrorCarriesLineNumber) {
  std::stringstream in;
  in << ToJson(Match("m1", "a", "b", Outcome::kLeftWins)).dump() << "\n\n"
     << "{\"match_id\": 3}\n";
  try {
    ReadJsonl<MatchRecord>(in, MatchFromJson);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(JsonlTest, SaveLoadMatches) {
  TempDir dir;
  std::vector<MatchRecord> ms = {Match("m1", "a", "b", Outcome::kLeftWins),
                                 Match("m2", "b", "c", Outcome::kBothGood)};
  SaveJsonl(dir / "m.jsonl", ms);
  EXPECT_EQ(LoadMatches(dir / "m.jsonl"), ms);
  EXPECT_THROW(LoadMatches(dir / "missing.jsonl"), Error);
}

TEST(MosJsonTest, RangeIsEnforced) {
  Json j{{"evaluator_id", "e"},
         {"image_id", "i"},
         {"prompt_following", 5},
         {"structural_accuracy", 6},
         {"aesthetic_quality", 3},
         {"submitted_at", "2026-01-01T00:00:00Z"}};
  EXPECT_THROW(MosFromJson(j), Error);
  j["structural_accuracy"] = 1;
  const MosRecord r = MosFromJson(j);
  EXPECT_EQ(r.score(Dimension::kStructuralAccuracy), 1);
  EXPECT_EQ(MosFromJson(ToJson(r)), r);
}

TEST(EvaluatorJsonTest, FlagsSurviveRoundTrip) {
  EvaluatorProfile p;
  p.evaluator_id = "ev9";
  p.mode = Mode::kExpert;
  p.persona = Persona::kDesigner;
  p.qualified = true;
  p.Flag("speed_anomaly");
  const EvaluatorProfile q = EvaluatorFromJson(ToJson(p));
  EXPECT_EQ(q.evaluator_id, "ev9");
  EXPECT_EQ(q.persona, Persona::kDesigner);
  EXPECT_TRUE(q.qualified);
  EXPECT_TRUE(q.flagged);
  EXPECT_EQ(q.flag_reasons, p.flag_reasons);
}

TEST(ModelEntriesTest, ExactlyOneBaseline) {
  std::vector<ModelEntry> none = {{"a", "A", false}, {"b", "B", false}};
  std::vector<ModelEntry> two = {{"a", "A", true}, {"b", "B", true}};
  std::vector<ModelEntry> dup = {{"a", "A", true}, {"a", "B", false}};
  std::vector<ModelEntry> ok = {{"a", "A", false}, {"b", "B", true}};
  EXPECT_THROW(ValidateModelEntries(none), Error);
  EXPECT_THROW(ValidateModelEntries(two), Error);
  EXPECT_THROW(ValidateModelEntries(dup), Error);
  EXPECT_EQ(ValidateModelEntries(ok), "b");
}

TEST(EvaluatorProfileTest, RunningMomentsMatchBatch) {
  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> dur(2.5, 0.4);
  EvaluatorProfile p;
  std::vector<double> xs;
  for (int i = 0; i < 500; ++i) {
    xs.push_back(dur(rng));
    p.ObserveDuration(xs.back());
  }
  EXPECT_EQ(p.n_votes, 500);
  EXPECT_NEAR(p.mean_duration_s, Mean(xs), 1e-10);
  EXPECT_NEAR(p.stddev_duration_s(), std::sqrt(SampleVariance(xs)), 1e-10);
}

TEST(ImageStoreTest, SamplesOrderedByIndex) {
  ImageStore store({{"i3", "m", "p", 3, "u3"}, {"i1", "m", "p", 1, "u1"},
                    {"i2", "m", "p", 2, "u2"}, {"j1", "n", "p", 1, "v1"}});
  const auto s = store.Samples("m", "p");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], "i1");
  EXPECT_EQ(s[2], "i3");
  EXPECT_TRUE(store.Samples("m", "q").empty());
  EXPECT_EQ(store.Find("j1")->model_id, "n");
  EXPECT_EQ(store.Find("zz"), nullptr);
}

TEST(ImageStoreTest, DuplicateIdRejected) {
  EXPECT_THROW(ImageStore({{"i1", "m", "p", 1, "u"}, {"i1", "n", "p", 1, "u"}}), Error);
}

}  // namespace
}  // namespace arena
