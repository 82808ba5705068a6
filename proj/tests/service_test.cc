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
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "arena/benchmark.h"
#include "arena/json_io.h"
#include "arena/leaderboard.h"
#include "arena/service.h"
#include "arena/simulator.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "test_util.h"

namespace arena {
namespace {

using ::arena::testing::DataPath;
using ::arena::testing::TempDir;

struct Response {
  int status = 0;
  Json body;
};

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    sim_ = LoadSimConfig(DataPath("sim_small.json"));
    world_ = BuildWorld(sim_);
    {
      std::ofstream f(dir_ / "benchmark.jsonl");
      WriteBenchmark(f, world_.benchmark);
    }
    Json models = Json::array();
    for (const ModelEntry& m : world_.models) models.push_back(ToJson(m));
    WriteFile(dir_ / "models.json", models.dump());
    SaveJsonl(dir_ / "images.jsonl", world_.images.images());
    SaveJsonl(dir_ / "anchors.jsonl", world_.anchors);
  }

  ServiceConfig Config(double anchor_rate = 0.0) {
    ServiceConfig c;
    c.port = 0;
    c.data_dir = dir_ / "store";
    c.fit_cadence_s = 0;
    c.bootstrap_rounds = 100;
    c.seed = 5;
    c.scheduler.anchor_rate = anchor_rate;
    c.benchmark_path = dir_ / "benchmark.jsonl";
    c.images_path = dir_ / "images.jsonl";
    c.models_path = dir_ / "models.json";
    c.anchors_path = dir_ / "anchors.jsonl";
    c.rubric_path = DataPath("rubric.json");
    return c;
  }

  void Boot(ServiceConfig c) {
    service_.reset();
    service_ = std::make_unique<Service>(std::move(c));
    ASSERT_TRUE(service_->Start());
  }

  Response Call(const std::string& method, const std::string& path, const Json& body = {}) {
    httplib::Client cli("127.0.0.1", service_->port());
    httplib::Result r = method == "GET"
                            ? cli.Get(path)
                            : cli.Post(path, body.is_null() ? "{}" : body.dump(),
                                       "application/json");
    if (!r) return {};
    Response out{r->status, Json::parse(r->body, nullptr, false)};
    if (out.body.is_discarded()) out.body = r->body;
    return out;
  }

  void Register(const std::string& id, const std::string& mode = "public",
                bool qualified = false) {
    const Response r =
        Call("POST", "/api/v1/evaluators", Json{{"evaluator_id", id}, {"mode", mode}});
    ASSERT_EQ(r.status, 201) << r.body.dump();
    if (qualified) {
      ASSERT_EQ(Call("POST", "/api/v1/evaluators/" + id + "/status", Json{{"qualified", true}})
                    .status,
                200);
    }
  }

  // Votes following the planted strengths; returns the number recorded.
  int CastVotes(const std::string& evaluator, int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    int recorded = 0;
    for (int i = 0; i < n; ++i) {
      const Response a = Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", evaluator}});
      if (a.status != 200) return recorded;
      const ModelId l = world_.images.Find(a.body["image_left"]["image_id"])->model_id;
      const ModelId r = world_.images.Find(a.body["image_right"]["image_id"])->model_id;
      const Outcome o = DrawOutcome(world_.xi.at(l) - world_.xi.at(r), 0.1, rng);
      const Response v = Call("POST", "/api/v1/matches/" + a.body["assignment_id"].get<std::string>() +
                                          "/vote",
                              Json{{"outcome", OutcomeName(o)}, {"duration_s", 10.0}});
      if (v.status == 200) ++recorded;
    }
    return recorded;
  }

  TempDir dir_;
  SimConfig sim_;
  SimWorld world_;
  std::unique_ptr<Service> service_;
};

TEST_F(ServiceTest, HealthOnBothPrefixes) {
  Boot(Config());
  EXPECT_EQ(Call("GET", "/api/health").status, 200);
  EXPECT_EQ(Call("GET", "/api/v1/health").body["status"], "ok");
  EXPECT_EQ(Call("GET", "/api/v2/health").status, 404);
}

TEST_F(ServiceTest, EvaluatorRegistration) {
  Boot(Config());
  Register("alice");
  EXPECT_EQ(Call("POST", "/api/evaluators", Json{{"evaluator_id", "alice"}, {"mode", "public"}})
                .status,
            409);
  EXPECT_EQ(Call("POST", "/api/evaluators", Json{{"evaluator_id", "bob"}, {"mode", "sideways"}})
                .status,
            400);
  EXPECT_EQ(Call("GET", "/api/v1/evaluators/nobody").status, 404);
  // Self-registration cannot pre-set status.
  Call("POST", "/api/evaluators",
       Json{{"evaluator_id", "carol"}, {"mode", "expert"}, {"flagged", true}, {"qualified", true}});
  EXPECT_EQ(Call("GET", "/api/v1/evaluators/carol").body["flagged"], false);
  EXPECT_EQ(Call("GET", "/api/v1/evaluators/carol").body["qualified"], false);
}

TEST_F(ServiceTest, AssignmentErrorsAndAnonymity) {
  Boot(Config(0.2));
  Register("pub");
  Register("exp", "expert", false);
  EXPECT_EQ(Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "ghost"}}).status, 404);
  EXPECT_EQ(Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "exp"}}).status, 403);
  EXPECT_EQ(
      Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "pub"}, {"mode", "x"}}).status,
      400);
  EXPECT_EQ(Call("POST", "/api/v1/matches/next", Json::object()).status, 400);
  for (int i = 0; i < 100; ++i) {
    const Response r = Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "pub"}});
    ASSERT_EQ(r.status, 200);
    const std::string text = r.body.dump();
    EXPECT_EQ(text.find("model"), std::string::npos) << text;
    EXPECT_EQ(text.find("anchor"), std::string::npos) << text;
    for (const char* side : {"image_left", "image_right"}) {
      EXPECT_NE(world_.images.Find(r.body[side]["image_id"]), nullptr);
    }
  }
  Call("POST", "/api/v1/evaluators/pub/status", Json{{"flagged", true}, {"reasons", {"manual"}}});
  EXPECT_EQ(Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "pub"}}).status, 403);
}

TEST_F(ServiceTest, VoteValidation) {
  Boot(Config());
  Register("a");
  Register("b");
  const Response asg = Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "a"}});
  const std::string vote = "/api/v1/matches/" + asg.body["assignment_id"].get<std::string>() +
                           "/vote";
  EXPECT_EQ(Call("POST", vote, Json{{"outcome", "maybe"}, {"duration_s", 4}}).status, 400);
  EXPECT_EQ(Call("POST", vote, Json{{"outcome", "left_wins"}, {"duration_s", -1}}).status, 400);
  EXPECT_EQ(Call("POST", vote, Json{{"outcome", "left_wins"}}).status, 400);
  EXPECT_EQ(Call("POST", vote,
                 Json{{"outcome", "left_wins"}, {"duration_s", 4}, {"evaluator_id", "b"}})
                .status,
            403);
  const Response ok = Call("POST", vote, Json{{"outcome", "both_good"}, {"duration_s", 4}});
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(ok.body["status"], "recorded");
  EXPECT_EQ(Call("POST", vote, Json{{"outcome", "left_wins"}, {"duration_s", 4}}).status, 409);
  EXPECT_EQ(Call("POST", "/api/v1/matches/as_nope/vote",
                 Json{{"outcome", "left_wins"}, {"duration_s", 4}})
                .status,
            404);
  EXPECT_EQ(Call("GET", "/api/v1/evaluators/a").body["n_votes"], 1);
}

TEST_F(ServiceTest, ConcurrentEvaluatorsGetDistinctAssignments) {
  Boot(Config());
  for (int i = 0; i < 50; ++i) Register("ev" + std::to_string(i));
  std::vector<std::string> ids(50);
  {
    std::vector<std::jthread> ts;
    for (int i = 0; i < 50; ++i) {
      ts.emplace_back([&, i] {
        const Response r =
            Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "ev" + std::to_string(i)}});
        if (r.status == 200) ids[i] = r.body.value("assignment_id", "");
      });
    }
  }
  const std::set<std::string> distinct(ids.begin(), ids.end());
  EXPECT_EQ(distinct.size(), 50u);
  EXPECT_FALSE(distinct.contains(""));
}

TEST_F(ServiceTest, LeaderboardMatchesLibraryFit) {
  Boot(Config());
  EXPECT_EQ(Call("GET", "/api/v1/leaderboard").status, 503);
  for (int e = 0; e < 4; ++e) {
    Register("v" + std::to_string(e));
    ASSERT_EQ(CastVotes("v" + std::to_string(e), 150, 100 + e), 150);
  }
  ASSERT_EQ(Call("POST", "/api/v1/admin/refit").status, 200);
  const Response lb = Call("GET", "/api/v1/leaderboard?mode=public");
  ASSERT_EQ(lb.status, 200);
  EXPECT_EQ(lb.body["baseline"], "m_base");
  EXPECT_EQ(lb.body["scope"], "Overall");

  Store store(dir_ / "store");
  const std::vector<MatchRecord> matches = store.Matches(Mode::kPublic);
  ASSERT_EQ(matches.size(), 600u);
  LeaderboardOptions o;
  o.bootstrap.rounds = 100;
  o.bootstrap.seed = 5;
  const Leaderboard ref = ComputeLeaderboard(BuildOutcomeTable(matches, ExcludeAnchors()),
                                             "m_base", o);
  EXPECT_EQ(lb.body["rows"].dump(), LeaderboardJson(ref.rows).dump());

  // Deterministic across fits of unchanged data.
  Call("POST", "/api/v1/admin/refit");
  EXPECT_EQ(Call("GET", "/api/v1/leaderboard").body.dump(), lb.body.dump());

  const Response expert = Call("GET", "/api/v1/leaderboard?mode=expert");
  EXPECT_EQ(expert.status, 200);
  EXPECT_TRUE(expert.body["rows"].empty());
  EXPECT_TRUE(expert.body.contains("error"));
  EXPECT_EQ(Call("GET", "/api/v1/leaderboard?scenario=Poetry").status, 404);
  EXPECT_EQ(Call("GET", "/api/v1/leaderboard?mode=loud").status, 400);
  const Response film = Call("GET", "/api/v1/leaderboard?scenario=Film");
  EXPECT_EQ(film.body["scope"], "Film");

  const Response pe = Call("GET", "/api/v1/reports/prompt-elo?model=m_gamma");
  EXPECT_EQ(pe.status, 200);
  EXPECT_EQ(pe.body["model_id"], "m_gamma");
  EXPECT_EQ(Call("GET", "/api/v1/reports/prompt-elo").status, 400);
  EXPECT_EQ(Call("GET", "/api/v1/reports/prompt-elo?model=zz").status, 404);
  const Response qc = Call("GET", "/api/v1/reports/qc");
  EXPECT_EQ(qc.status, 200);
  EXPECT_EQ(qc.body["evaluators"].size(), 4u);
  EXPECT_EQ(Call("GET", "/api/v1/reports/weights?strata=colour").status, 404);
}

TEST_F(ServiceTest, RestartPreservesVotesAndSuspensions) {
  Boot(Config());
  Register("keep");
  Register("bad");
  ASSERT_EQ(CastVotes("keep", 20, 1), 20);
  Call("POST", "/api/v1/evaluators/bad/status", Json{{"flagged", true}, {"reasons", {"manual"}}});
  const Response pending = Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "keep"}});
  Boot(Config());
  const Response status = Call("GET", "/api/v1/admin/status");
  EXPECT_EQ(status.body["matches"]["public"], 20);
  EXPECT_EQ(status.body["pending_assignments"], 0);
  EXPECT_EQ(Call("GET", "/api/v1/evaluators/keep").body["n_votes"], 20);
  EXPECT_EQ(Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "bad"}}).status, 403);
  // Assignments do not survive a restart, and new ids never collide.
  EXPECT_EQ(Call("POST",
                 "/api/v1/matches/" + pending.body["assignment_id"].get<std::string>() + "/vote",
                 Json{{"outcome", "left_wins"}, {"duration_s", 3}})
                .status,
            404);
  const std::string export_text =
      httplib::Client("127.0.0.1", service_->port()).Get("/api/v1/export/matches")->body;
  EXPECT_EQ(std::count(export_text.begin(), export_text.end(), '\n'), 20);
}

TEST_F(ServiceTest, AnchorFailuresSuspendInline) {
  ServiceConfig c = Config(0.5);
  Boot(c);
  Register("tie_lover");
  int served = 0;
  for (int i = 0; i < 200; ++i) {
    const Response a = Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "tie_lover"}});
    if (a.status == 403) break;
    ASSERT_EQ(a.status, 200);
    ++served;
    Call("POST", "/api/v1/matches/" + a.body["assignment_id"].get<std::string>() + "/vote",
         Json{{"outcome", "both_bad"}, {"duration_s", 10}});
  }
  EXPECT_LT(served, 200);
  const Json p = Call("GET", "/api/v1/evaluators/tie_lover").body;
  EXPECT_TRUE(p["flagged"].get<bool>());
  EXPECT_EQ(p["anchor_seen"], 10);
  EXPECT_EQ(p["flag_reasons"][0], "anchor_failure");
}

TEST_F(ServiceTest, MosTasksAndBatches) {
  Boot(Config());
  Register("expert1", "expert", true);
  Register("novice", "public", false);
  EXPECT_EQ(Call("POST", "/api/v1/mos/next", Json{{"evaluator_id", "novice"}}).status, 403);
  EXPECT_EQ(Call("POST", "/api/v1/mos/next", Json{{"evaluator_id", "ghost"}}).status, 404);
  const Response task = Call("POST", "/api/v1/mos/next", Json{{"evaluator_id", "expert1"}});
  ASSERT_EQ(task.status, 200);
  const Json& images = task.body["images"];
  ASSERT_EQ(images.size(), 16u);  // 4 models x 4 samples
  EXPECT_EQ(task.body.dump().find("model"), std::string::npos);

  auto sheet = [](const std::string& ev, const Json& img) {
    return Json{{"evaluator_id", ev},
                {"image_id", img["image_id"]},
                {"prompt_following", 4},
                {"structural_accuracy", 3},
                {"aesthetic_quality", 5}};
  };
  Json partial = Json::array();
  for (size_t i = 0; i + 1 < images.size(); ++i) partial.push_back(sheet("expert1", images[i]));
  EXPECT_EQ(Call("POST", "/api/v1/mos", partial).status, 400);
  Json bad = sheet("expert1", images[0]);
  bad["aesthetic_quality"] = 9;
  EXPECT_EQ(Call("POST", "/api/v1/mos", bad).status, 400);
  EXPECT_EQ(Call("POST", "/api/v1/mos", sheet("novice", images[0])).status, 403);
  Json unknown = sheet("expert1", images[0]);
  unknown["image_id"] = "img_missing";
  EXPECT_EQ(Call("POST", "/api/v1/mos", unknown).status, 404);

  Json full = partial;
  full.push_back(sheet("expert1", images.back()));
  const Response ok = Call("POST", "/api/v1/mos", full);
  EXPECT_EQ(ok.status, 200) << ok.body.dump();
  EXPECT_EQ(ok.body["n_records"], 16);
  EXPECT_EQ(Call("POST", "/api/v1/mos", sheet("expert1", images[0])).status, 409);
  const Response next = Call("POST", "/api/v1/mos/next", Json{{"evaluator_id", "expert1"}});
  EXPECT_NE(next.body["prompt_id"], task.body["prompt_id"]);

  const Response report = Call("GET", "/api/v1/reports/mos");
  ASSERT_EQ(report.status, 200);
  EXPECT_TRUE(report.body["dimensions"]["prompt_following"]["Overall"]["m_base"].is_object());
  EXPECT_EQ(report.body["correlations"].size(), 1u);
  EXPECT_EQ(Call("GET", "/api/v1/rubric").body["scale"], Json::array({1, 5}));
}

TEST_F(ServiceTest, QualificationGate) {
  Boot(Config());
  Register("cand", "expert", false);
  const Json consensus = {"left_wins", "right_wins", "both_good", "both_bad", "left_wins",
                          "right_wins", "both_good", "both_bad", "left_wins", "right_wins"};
  Json wrong = consensus;
  wrong[0] = "right_wins";
  wrong[1] = "left_wins";
  Response r = Call("POST", "/api/v1/evaluators/cand/qualification",
                    Json{{"candidate", wrong}, {"consensus", consensus}});
  EXPECT_EQ(r.status, 200);
  EXPECT_FALSE(r.body["passed"].get<bool>());
  r = Call("POST", "/api/v1/evaluators/cand/qualification",
           Json{{"candidate", consensus}, {"consensus", consensus}});
  EXPECT_TRUE(r.body["qualified"].get<bool>());
  EXPECT_EQ(Call("POST", "/api/v1/matches/next",
                 Json{{"evaluator_id", "cand"}, {"mode", "expert"}})
                .status,
            200);
}

TEST_F(ServiceTest, NoImagesGives503) {
  WriteFile(dir_ / "empty.jsonl", "");
  ServiceConfig c = Config();
  c.images_path = dir_ / "empty.jsonl";
  Boot(c);
  Register("x");
  EXPECT_EQ(Call("POST", "/api/v1/matches/next", Json{{"evaluator_id", "x"}}).status, 503);
}

TEST(ServiceConfigTest, ResolvesPathsAndHonorsEnvironment) {
  const Json j = {{"port", 9000},
                  {"data_dir", "store"},
                  {"benchmark", "b.jsonl"},
                  {"images", "/abs/i.jsonl"},
                  {"models", "m.json"},
                  {"qc", {{"min_anchors", 12}}}};
  ::unsetenv("ARENA_DATA_DIR");
  ServiceConfig c = ServiceConfigFromJson(j, "/srv/arena");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.data_dir, std::filesystem::path("/srv/arena/store"));
  EXPECT_EQ(c.images_path, std::filesystem::path("/abs/i.jsonl"));
  EXPECT_EQ(c.fit_cadence_s, 300.0);
  EXPECT_EQ(c.qc.min_anchors, 12);
  ::setenv("ARENA_DATA_DIR", "/tmp/elsewhere", 1);
  EXPECT_EQ(ServiceConfigFromJson(j, "/srv/arena").data_dir,
            std::filesystem::path("/tmp/elsewhere"));
  ::unsetenv("ARENA_DATA_DIR");
  Json bad = j;
  bad.erase("models");
  EXPECT_THROW(ServiceConfigFromJson(bad), Error);
  bad = j;
  bad["bootstrap_rounds"] = 50;
  EXPECT_THROW(ServiceConfigFromJson(bad), Error);
}

}  // namespace
}  // namespace arena
