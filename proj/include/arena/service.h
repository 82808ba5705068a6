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

// HTTP evaluation service.
//
// Routes are served under /api and /api/v1:
//
//   POST /evaluators                       register (201; 409 if present)
//   GET  /evaluators/{id}                  profile with running statistics
//   POST /evaluators/{id}/status           set qualified / flagged
//   POST /evaluators/{id}/qualification    grade a calibration set
//   POST /matches/next                     anonymized assignment
//   POST /matches/{assignment_id}/vote     record a vote
//   POST /mos/next                         MOS task for one prompt
//   POST /mos                              one MosRecord or an array
//   GET  /leaderboard?mode=&scenario=      latest fit snapshot
//   GET  /reports/mos                      per-scope MOS table
//   GET  /reports/weights?strata=&mode=    joint-analysis fits
//   GET  /reports/qc                       evaluator flags
//   GET  /reports/prompt-elo?model=&mode=  per-prompt decomposition
//   GET  /export/matches?mode=             JSON Lines
//   GET  /rubric, GET /health
//   POST /admin/refit, POST /admin/compact, GET /admin/status
//
// Votes go straight to the store. Leaderboards come from an immutable
// snapshot that a background thread replaces every fit_cadence_s seconds
// (or on /admin/refit), so fitting never holds the vote path.

#ifndef ARENA_SERVICE_H_
#define ARENA_SERVICE_H_

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "arena/benchmark.h"
#include "arena/json_io.h"
#include "arena/leaderboard.h"
#include "arena/quality_control.h"
#include "arena/scheduler.h"
#include "arena/store.h"
#include "arena/types.h"

namespace httplib {
class Server;
}

namespace arena {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "arena_data";
  SchedulerConfig scheduler;
  double fit_cadence_s = 300.0;
  QcOptions qc;
  int bootstrap_rounds = 1000;
  uint64_t seed = 0;
  std::filesystem::path benchmark_path;
  std::filesystem::path images_path;
  std::filesystem::path models_path;
  std::filesystem::path anchors_path;  // optional
  std::filesystem::path rubric_path;   // optional
};

// Relative paths resolve against `base_dir`. ARENA_DATA_DIR, when set,
// overrides data_dir. Throws kSchema / kValidation.
ServiceConfig ServiceConfigFromJson(const Json& j, const std::filesystem::path& base_dir = {});
ServiceConfig LoadServiceConfig(const std::filesystem::path& path);

// Everything one fit cycle produces. Immutable once published.
struct FitSnapshot {
  struct Scope {
    std::optional<Leaderboard> board;
    std::string error;  // set when the fit was not possible
  };
  int64_t generation = 0;
  Timestamp finished_at{};
  double seconds = 0.0;
  // Keyed by "<mode>/<scope>", scope "Overall" or a scenario name.
  std::map<std::string, Scope> scopes;
};

class Service {
 public:
  // Loads the static inputs and replays the store. Throws on bad input.
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves until Stop(). A port of 0 picks a free one; see
  // port() once ready() is true. Returns false when binding fails.
  bool Listen();
  // Starts Listen() on a thread and waits until it is accepting.
  bool Start();
  void Stop();
  int port() const { return port_.load(); }
  bool ready() const;

  // Runs one synchronous fit cycle and publishes it.
  std::shared_ptr<const FitSnapshot> Refit();
  std::shared_ptr<const FitSnapshot> snapshot() const;

  const ServiceConfig& config() const { return config_; }

 private:
  struct Pending {
    MatchAssignment assignment;
    EvaluatorId evaluator_id;
    Mode mode = Mode::kPublic;
  };

  bool Bind();
  void RegisterRoutes();
  void FitLoop(std::stop_token stop);
  void UpdateProfileLocked(const MatchRecord& m);
  EvaluatorProfile* FindProfileLocked(const EvaluatorId& id);

  ServiceConfig config_;
  Benchmark benchmark_;
  ImageStore images_;
  std::vector<ModelEntry> models_;
  ModelId baseline_;
  std::vector<AnchorPair> anchors_;
  AnchorIndex anchor_index_;
  Json rubric_;
  std::unique_ptr<Store> store_;

  // Guards everything below it.
  mutable std::mutex mu_;
  std::map<EvaluatorId, EvaluatorProfile> profiles_;
  std::map<std::string, Pending> pending_;
  std::map<Mode, SchedulerState> schedulers_;
  std::mt19937_64 rng_;
  std::string boot_tag_;
  uint64_t counter_ = 0;

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const FitSnapshot> snapshot_;
  std::mutex fit_mu_;  // one fit at a time

  std::unique_ptr<httplib::Server> server_;
  std::atomic<int> port_{0};
  std::thread listen_thread_;
  std::jthread fit_thread_;
  std::condition_variable_any fit_cv_;
  std::mutex fit_wait_mu_;
};

}  // namespace arena

#endif  // ARENA_SERVICE_H_
