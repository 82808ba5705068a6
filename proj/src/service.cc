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

#include "arena/service.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>

#include "arena/error.h"
#include "arena/joint_analysis.h"
#include "arena/mos.h"
#include "arena/prompt_elo.h"
#include "httplib.h"
#include "spdlog/spdlog.h"

namespace arena {

namespace {

constexpr char kOverall[] = "Overall";

Timestamp Now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSchema:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kValidation:
    case ErrorCode::kConnectivity:
    case ErrorCode::kNonConvergence:
    case ErrorCode::kUndefined:
      return 422;
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

// Thrown from handlers to produce a specific status.
struct HttpError {
  int status;
  std::string message;
};

void Reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& message) {
  Reply(res, status, Json{{"error", message}, {"status", status}});
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler Guard(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const HttpError& e) {
      ReplyError(res, e.status, e.message);
    } catch (const Error& e) {
      ReplyError(res, StatusFor(e.code()), e.what());
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      ReplyError(res, 500, e.what());
    }
  };
}

Json ParseBody(const httplib::Request& req) {
  Json j = Json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw HttpError{400, "request body is not valid JSON"};
  return j;
}

Json ParseObject(const httplib::Request& req) {
  Json j = ParseBody(req);
  if (!j.is_object()) throw HttpError{400, "request body must be a JSON object"};
  return j;
}

std::string RequiredString(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw HttpError{400, std::string("missing string field ") + key};
  }
  return j[key].get<std::string>();
}

std::optional<Mode> ModeParam(const httplib::Request& req, bool allow_all) {
  if (!req.has_param("mode")) return std::nullopt;
  const std::string v = req.get_param_value("mode");
  if (allow_all && v == "all") return std::nullopt;
  auto m = ParseMode(v);
  if (!m) throw HttpError{400, "unknown mode: " + v};
  return m;
}

std::string ScopeKey(Mode mode, const std::string& scope) {
  return std::string(ModeName(mode)) + "/" + scope;
}

std::string Hex(uint64_t v, int width) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf + 16 - width);
}

}  // namespace

ServiceConfig ServiceConfigFromJson(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "service config must be an object");
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    if (j.contains("data_dir")) c.data_dir = Resolve(base_dir, j["data_dir"].get<std::string>());
    if (j.contains("scheduler")) c.scheduler = SchedulerConfigFromJson(j["scheduler"]);
    c.fit_cadence_s = j.value("fit_cadence_s", c.fit_cadence_s);
    if (j.contains("qc")) c.qc = QcOptionsFromJson(j["qc"]);
    c.bootstrap_rounds = j.value("bootstrap_rounds", c.bootstrap_rounds);
    c.seed = j.value("seed", c.seed);
    auto path = [&](const char* key, std::filesystem::path* out) {
      if (j.contains(key)) *out = Resolve(base_dir, j[key].get<std::string>());
    };
    path("benchmark", &c.benchmark_path);
    path("images", &c.images_path);
    path("models", &c.models_path);
    path("anchors", &c.anchors_path);
    path("rubric", &c.rubric_path);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("service config: ") + e.what());
  }
  if (const char* env = std::getenv("ARENA_DATA_DIR"); env && *env) c.data_dir = env;
  if (c.port < 0 || c.port > 65535) {
    throw Error(ErrorCode::kValidation, "port out of range: " + std::to_string(c.port));
  }
  if (c.bootstrap_rounds != 0 && c.bootstrap_rounds < 100) {
    throw Error(ErrorCode::kValidation, "bootstrap_rounds must be 0 or at least 100");
  }
  for (auto [name, p] : {std::pair{"benchmark", &c.benchmark_path},
                         std::pair{"images", &c.images_path},
                         std::pair{"models", &c.models_path}}) {
    if (p->empty()) throw Error(ErrorCode::kSchema, std::string("service config: missing ") + name);
  }
  ValidateSchedulerConfig(c.scheduler);
  return c;
}

ServiceConfig LoadServiceConfig(const std::filesystem::path& path) {
  Json j = Json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kSchema, path.string() + ": not valid JSON");
  return ServiceConfigFromJson(j, path.parent_path());
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  benchmark_ = LoadBenchmarkFile(config_.benchmark_path);
  images_ = ImageStore(LoadImages(config_.images_path));
  models_ = LoadModels(config_.models_path);
  baseline_ = ValidateModelEntries(models_);
  if (!config_.anchors_path.empty()) anchors_ = LoadAnchors(config_.anchors_path);
  anchor_index_ = AnchorIndex(anchors_);
  if (!config_.rubric_path.empty()) {
    rubric_ = Json::parse(ReadFile(config_.rubric_path), nullptr, false);
    if (rubric_.is_discarded()) {
      throw Error(ErrorCode::kSchema, config_.rubric_path.string() + ": not valid JSON");
    }
  }
  store_ = std::make_unique<Store>(config_.data_dir);

  std::random_device rd;
  boot_tag_ = Hex((static_cast<uint64_t>(rd()) << 32) ^ rd(), 12);

  std::vector<ModelId> ids;
  for (const ModelEntry& m : models_) ids.push_back(m.model_id);
  for (Mode mode : {Mode::kExpert, Mode::kPublic}) {
    SchedulerState& s = schedulers_[mode];
    s.models = ids;
    s.anchors = anchors_;
    s.config = config_.scheduler;
  }
  profiles_ = store_->Evaluators();
  for (const MatchRecord& m : store_->Matches()) {
    UpdateProfileLocked(m);
    if (!m.is_anchor) schedulers_[m.mode].RecordPair(m.model_left, m.model_right);
  }
  server_ = std::make_unique<httplib::Server>();
  RegisterRoutes();
}

Service::~Service() { Stop(); }

EvaluatorProfile* Service::FindProfileLocked(const EvaluatorId& id) {
  auto it = profiles_.find(id);
  return it == profiles_.end() ? nullptr : &it->second;
}

void Service::UpdateProfileLocked(const MatchRecord& m) {
  EvaluatorProfile* p = FindProfileLocked(m.evaluator_id);
  if (!p) {
    // Votes imported without a registration event.
    EvaluatorProfile fresh;
    fresh.evaluator_id = m.evaluator_id;
    fresh.mode = m.mode;
    p = &profiles_.emplace(m.evaluator_id, fresh).first->second;
  }
  p->ObserveDuration(m.duration_s);
  if (m.is_anchor) {
    if (const AnchorPair* a = anchor_index_.Find(m.image_left, m.image_right)) {
      ++p->anchor_seen;
      if (!AnchorVoteCorrect(m, *a)) ++p->anchor_failed;
    }
  }
}

std::shared_ptr<const FitSnapshot> Service::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return snapshot_;
}

std::shared_ptr<const FitSnapshot> Service::Refit() {
  std::lock_guard fit_lock(fit_mu_);
  const auto start = std::chrono::steady_clock::now();
  std::vector<EvaluatorProfile> profiles;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, p] : profiles_) profiles.push_back(p);
  }
  auto snap = std::make_shared<FitSnapshot>();
  {
    std::lock_guard lock(snapshot_mu_);
    snap->generation = snapshot_ ? snapshot_->generation + 1 : 1;
  }
  LeaderboardOptions opts;
  opts.with_bootstrap = config_.bootstrap_rounds > 0;
  opts.bootstrap.rounds = std::max(config_.bootstrap_rounds, 100);
  opts.bootstrap.seed = config_.seed;

  std::vector<std::pair<std::string, MatchFilter>> scopes = {{kOverall, ExcludeAnchors()}};
  for (Scenario s : kAllScenarios) {
    scopes.push_back(
        {std::string(ScenarioName(s)), AllOf({ExcludeAnchors(), InScenario(benchmark_, s)})});
  }
  for (Mode mode : {Mode::kExpert, Mode::kPublic}) {
    const std::vector<MatchRecord> raw = store_->Matches(mode);
    const std::vector<MatchRecord> matches = ApplyFlags(raw, profiles);
    for (const auto& [name, filter] : scopes) {
      FitSnapshot::Scope& scope = snap->scopes[ScopeKey(mode, name)];
      const OutcomeTable table = BuildOutcomeTable(matches, filter);
      if (table.size() < 2) {
        scope.error = "not enough matches to fit";
        continue;
      }
      try {
        scope.board = ComputeLeaderboard(table, baseline_, opts);
      } catch (const Error& e) {
        scope.error = e.what();
      }
    }
  }

  // Automatic suspension from the QC rules.
  const QcReport qc = RunQc(store_->Matches(), anchors_, profiles, config_.qc);
  {
    std::lock_guard lock(mu_);
    for (const EvaluatorProfile& flagged : qc.profiles) {
      if (!flagged.flagged) continue;
      EvaluatorProfile* live = FindProfileLocked(flagged.evaluator_id);
      if (!live) continue;
      bool changed = !live->flagged;
      for (const std::string& r : flagged.flag_reasons) {
        changed |= !live->flag_reasons.contains(r);
        live->Flag(r);
      }
      if (changed) {
        spdlog::warn("evaluator {} suspended by QC", live->evaluator_id);
        store_->AppendEvaluator(*live);
      }
    }
    for (Mode mode : {Mode::kExpert, Mode::kPublic}) {
      const FitSnapshot::Scope& overall = snap->scopes[ScopeKey(mode, kOverall)];
      if (overall.board) schedulers_[mode].current_fit = overall.board->fit;
    }
  }

  snap->finished_at = Now();
  snap->seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::lock_guard lock(snapshot_mu_);
    snapshot_ = snap;
  }
  spdlog::info("fit generation {} done in {:.2f}s", snap->generation, snap->seconds);
  return snap;
}

void Service::FitLoop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    try {
      Refit();
    } catch (const std::exception& e) {
      spdlog::error("background fit failed: {}", e.what());
    }
    std::unique_lock lock(fit_wait_mu_);
    fit_cv_.wait_for(lock, stop, std::chrono::duration<double>(config_.fit_cadence_s),
                     [] { return false; });
  }
}

bool Service::Bind() {
  const int port = config_.port == 0 ? server_->bind_to_any_port(config_.host)
                                     : (server_->bind_to_port(config_.host, config_.port)
                                            ? config_.port
                                            : -1);
  if (port < 0) {
    spdlog::error("cannot bind {}:{}", config_.host, config_.port);
    return false;
  }
  port_ = port;
  if (config_.fit_cadence_s > 0) {
    fit_thread_ = std::jthread([this](std::stop_token st) { FitLoop(st); });
  }
  spdlog::info("listening on {}:{}", config_.host, port);
  return true;
}

bool Service::Listen() { return Bind() && server_->listen_after_bind(); }

bool Service::Start() {
  if (!Bind()) return false;
  listen_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return true;
}

bool Service::ready() const { return server_ && server_->is_running(); }

void Service::Stop() {
  if (server_) server_->stop();
  if (listen_thread_.joinable()) listen_thread_.join();
  if (fit_thread_.joinable()) {
    fit_thread_.request_stop();
    fit_cv_.notify_all();
    fit_thread_.join();
  }
}

void Service::RegisterRoutes() {
  httplib::Server& srv = *server_;
  for (const std::string prefix : {"/api", "/api/v1"}) {
    srv.Get(prefix + "/health", Guard([](const auto&, auto& res) {
              Reply(res, 200, Json{{"status", "ok"}});
            }));

    // Evaluators.
    srv.Post(prefix + "/evaluators", Guard([this](const auto& req, auto& res) {
               Json body = ParseObject(req);
               // Qualification and suspension are granted through /status or the
               // qualification route, never at self-registration.
               body.erase("qualified");
               body.erase("flagged");
               body.erase("flag_reasons");
               EvaluatorProfile p;
               try {
                 p = EvaluatorFromJson(body);
               } catch (const Error& e) {
                 throw HttpError{400, e.what()};
               }
               if (p.evaluator_id.empty()) throw HttpError{400, "empty evaluator_id"};
               std::lock_guard lock(mu_);
               if (profiles_.contains(p.evaluator_id)) {
                 throw HttpError{409, "evaluator " + p.evaluator_id + " already registered"};
               }
               store_->AppendEvaluator(p);
               profiles_[p.evaluator_id] = p;
               Reply(res, 201, ToJson(p));
             }));
    srv.Get(prefix + R"(/evaluators/([^/]+))", Guard([this](const auto& req, auto& res) {
              std::lock_guard lock(mu_);
              const EvaluatorProfile* p = FindProfileLocked(req.matches[1]);
              if (!p) throw HttpError{404, "unknown evaluator " + std::string(req.matches[1])};
              Reply(res, 200, ToJson(*p));
            }));
    srv.Post(prefix + R"(/evaluators/([^/]+)/status)", Guard([this](const auto& req, auto& res) {
               const Json body = ParseObject(req);
               std::lock_guard lock(mu_);
               EvaluatorProfile* p = FindProfileLocked(req.matches[1]);
               if (!p) throw HttpError{404, "unknown evaluator " + std::string(req.matches[1])};
               EvaluatorProfile next = *p;
               if (body.contains("qualified")) {
                 if (!body["qualified"].is_boolean()) throw HttpError{400, "qualified: bool"};
                 next.qualified = body["qualified"].get<bool>();
               }
               if (body.contains("flagged")) {
                 if (!body["flagged"].is_boolean()) throw HttpError{400, "flagged: bool"};
                 next.flagged = body["flagged"].get<bool>();
                 if (!next.flagged) next.flag_reasons.clear();
               }
               if (body.contains("reasons")) {
                 if (!body["reasons"].is_array()) throw HttpError{400, "reasons: array"};
                 for (const Json& r : body["reasons"]) {
                   if (!r.is_string()) throw HttpError{400, "reasons: strings"};
                   next.Flag(r.get<std::string>());
                 }
               }
               store_->AppendEvaluator(next);
               *p = next;
               Reply(res, 200, ToJson(*p));
             }));
    srv.Post(prefix + R"(/evaluators/([^/]+)/qualification)",
             Guard([this](const auto& req, auto& res) {
               const Json body = ParseObject(req);
               auto outcomes = [&](const char* key) {
                 if (!body.contains(key) || !body[key].is_array()) {
                   throw HttpError{400, std::string("missing array ") + key};
                 }
                 std::vector<Outcome> out;
                 for (const Json& o : body[key]) {
                   auto parsed = o.is_string() ? ParseOutcome(o.get<std::string>()) : std::nullopt;
                   if (!parsed) throw HttpError{400, std::string("invalid outcome in ") + key};
                   out.push_back(*parsed);
                 }
                 return out;
               };
               const std::vector<Outcome> candidate = outcomes("candidate");
               const std::vector<Outcome> consensus = outcomes("consensus");
               std::lock_guard lock(mu_);
               EvaluatorProfile* p = FindProfileLocked(req.matches[1]);
               if (!p) throw HttpError{404, "unknown evaluator " + std::string(req.matches[1])};
               const QualificationResult q = QualifyExpert(candidate, consensus);
               if (q.passed && !p->qualified) {
                 EvaluatorProfile next = *p;
                 next.qualified = true;
                 store_->AppendEvaluator(next);
                 *p = next;
               }
               Reply(res, 200,
                     Json{{"evaluator_id", p->evaluator_id},
                          {"passed", q.passed},
                          {"agreement", q.agreement},
                          {"kappa", q.kappa},
                          {"n_items", q.n_items},
                          {"qualified", p->qualified}});
             }));

    // Match assignment and voting.
    srv.Post(prefix + "/matches/next", Guard([this](const auto& req, auto& res) {
               const Json body = ParseObject(req);
               const EvaluatorId id = RequiredString(body, "evaluator_id");
               std::optional<Mode> mode;
               if (body.contains("mode")) {
                 mode = body["mode"].is_string() ? ParseMode(body["mode"].get<std::string>())
                                                 : std::nullopt;
                 if (!mode) throw HttpError{400, "invalid mode"};
               }
               std::lock_guard lock(mu_);
               const EvaluatorProfile* p = FindProfileLocked(id);
               if (!p) throw HttpError{404, "unknown evaluator " + id};
               if (p->flagged) throw HttpError{403, "evaluator " + id + " is suspended"};
               const Mode m = mode.value_or(p->mode);
               if (m == Mode::kExpert && !p->qualified) {
                 throw HttpError{403, "evaluator " + id + " is not qualified for expert mode"};
               }
               if (images_.size() == 0 || benchmark_.empty()) {
                 throw HttpError{503, "no images available"};
               }
               MatchAssignment a;
               try {
                 a = NextMatch(schedulers_[m], benchmark_, images_, rng_);
               } catch (const Error& e) {
                 throw HttpError{503, e.what()};
               }
               a.assignment_id = "as_" + boot_tag_ + "_" + Hex(++counter_, 8);
               pending_[a.assignment_id] = Pending{a, id, m};
               Reply(res, 200, AnonymizedProjection(a, benchmark_, images_));
             }));
    srv.Post(prefix + R"(/matches/([^/]+)/vote)", Guard([this](const auto& req, auto& res) {
               const std::string assignment_id = req.matches[1];
               const Json body = ParseObject(req);
               const std::string outcome_text = RequiredString(body, "outcome");
               const auto outcome = ParseOutcome(outcome_text);
               if (!outcome) throw HttpError{400, "invalid outcome: " + outcome_text};
               if (!body.contains("duration_s") || !body["duration_s"].is_number()) {
                 throw HttpError{400, "missing number field duration_s"};
               }
               const double duration = body["duration_s"].get<double>();
               if (!std::isfinite(duration) || duration <= 0.0) {
                 throw HttpError{400, "duration_s must be positive"};
               }
               std::lock_guard lock(mu_);
               if (store_->HasMatch(assignment_id)) {
                 throw HttpError{409, "assignment " + assignment_id + " already voted"};
               }
               auto it = pending_.find(assignment_id);
               if (it == pending_.end()) {
                 throw HttpError{404, "unknown assignment " + assignment_id};
               }
               const Pending& pending = it->second;
               if (body.contains("evaluator_id") &&
                   body["evaluator_id"] != Json(pending.evaluator_id)) {
                 throw HttpError{403, "assignment was issued to another evaluator"};
               }
               const MatchAssignment& a = pending.assignment;
               MatchRecord m;
               m.match_id = assignment_id;
               m.model_left = a.model_left;
               m.model_right = a.model_right;
               m.prompt_id = a.prompt_id;
               m.image_left = a.image_left;
               m.image_right = a.image_right;
               m.outcome = *outcome;
               m.evaluator_id = pending.evaluator_id;
               m.submitted_at = Now();
               m.duration_s = duration;
               m.is_anchor = a.is_anchor;
               m.mode = pending.mode;
               store_->AppendMatch(m);
               pending_.erase(it);
               UpdateProfileLocked(m);
               if (m.is_anchor) {
                 EvaluatorProfile* p = FindProfileLocked(m.evaluator_id);
                 if (!p->flag_reasons.contains(kFlagAnchor) &&
                     AnchorFailureAssess(*p, config_.qc.min_anchors,
                                         config_.qc.anchor_fail_threshold)) {
                   p->Flag(kFlagAnchor);
                   store_->AppendEvaluator(*p);
                   spdlog::warn("evaluator {} suspended: anchor failures", p->evaluator_id);
                 }
               }
               Reply(res, 200, Json{{"status", "recorded"}, {"match_id", m.match_id}});
             }));

    // MOS.
    srv.Post(prefix + "/mos/next", Guard([this](const auto& req, auto& res) {
               const Json body = ParseObject(req);
               const EvaluatorId id = RequiredString(body, "evaluator_id");
               {
                 std::lock_guard lock(mu_);
                 const EvaluatorProfile* p = FindProfileLocked(id);
                 if (!p) throw HttpError{404, "unknown evaluator " + id};
                 if (p->flagged) throw HttpError{403, "evaluator " + id + " is suspended"};
                 if (!p->qualified) throw HttpError{403, "evaluator " + id + " is not qualified"};
               }
               std::set<ImageId> done;
               std::map<PromptId, int64_t> load;
               for (const MosRecord& r : store_->Mos()) {
                 if (r.evaluator_id == id) done.insert(r.image_id);
                 if (const GeneratedImage* g = images_.Find(r.image_id)) ++load[g->prompt_id];
               }
               const PromptItem* best = nullptr;
               std::vector<const GeneratedImage*> task;
               for (const PromptItem& prompt : benchmark_.prompts()) {
                 std::vector<const GeneratedImage*> todo;
                 for (const ModelEntry& model : models_) {
                   for (const ImageId& img : images_.Samples(model.model_id, prompt.prompt_id)) {
                     if (!done.contains(img)) todo.push_back(images_.Find(img));
                   }
                 }
                 if (todo.empty()) continue;
                 if (!best || load[prompt.prompt_id] < load[best->prompt_id]) {
                   best = &prompt;
                   task = std::move(todo);
                 }
               }
               if (!best) throw HttpError{404, "no unscored images left for " + id};
               std::lock_guard lock(mu_);
               std::shuffle(task.begin(), task.end(), rng_);
               Json imgs = Json::array();
               for (const GeneratedImage* g : task) {
                 imgs.push_back({{"image_id", g->image_id}, {"uri", g->uri}});
               }
               Reply(res, 200,
                     Json{{"prompt_id", best->prompt_id},
                          {"prompt_text", best->text},
                          {"images", imgs}});
             }));
    srv.Post(prefix + "/mos", Guard([this](const auto& req, auto& res) {
               Json body = ParseBody(req);
               const bool batch = body.is_array();
               if (!batch && !body.is_object()) throw HttpError{400, "expected object or array"};
               if (!batch) body = Json::array({body});
               if (body.empty()) throw HttpError{400, "empty submission"};
               std::vector<MosRecord> records;
               const std::string now = FormatTimestamp(Now());
               for (Json& item : body) {
                 if (!item.is_object()) throw HttpError{400, "MOS records must be objects"};
                 if (!item.contains("submitted_at")) item["submitted_at"] = now;
                 try {
                   records.push_back(MosFromJson(item));
                 } catch (const Error& e) {
                   throw HttpError{400, e.what()};
                 }
               }
               std::set<std::pair<EvaluatorId, ImageId>> seen;
               std::set<std::pair<EvaluatorId, PromptId>> tasks;
               for (const MosRecord& r : records) {
                 const GeneratedImage* g = images_.Find(r.image_id);
                 if (!g) throw HttpError{404, "unknown image " + r.image_id};
                 tasks.insert({r.evaluator_id, g->prompt_id});
                 if (!seen.insert({r.evaluator_id, r.image_id}).second) {
                   throw HttpError{400, "image " + r.image_id + " appears twice"};
                 }
               }
               std::lock_guard lock(mu_);
               for (const MosRecord& r : records) {
                 const EvaluatorProfile* p = FindProfileLocked(r.evaluator_id);
                 if (!p) throw HttpError{404, "unknown evaluator " + r.evaluator_id};
                 if (p->flagged) throw HttpError{403, "evaluator " + r.evaluator_id + " is suspended"};
                 if (!p->qualified) {
                   throw HttpError{403, "evaluator " + r.evaluator_id + " is not qualified"};
                 }
               }
               std::set<std::pair<EvaluatorId, ImageId>> stored;
               for (const MosRecord& r : store_->Mos()) stored.insert({r.evaluator_id, r.image_id});
               for (const MosRecord& r : records) {
                 if (stored.contains({r.evaluator_id, r.image_id})) {
                   throw HttpError{409, r.evaluator_id + " already scored " + r.image_id};
                 }
               }
               if (batch) {
                 // A task submission covers every remaining image of its prompt.
                 for (const auto& [ev, prompt] : tasks) {
                   for (const ModelEntry& model : models_) {
                     for (const ImageId& img : images_.Samples(model.model_id, prompt)) {
                       if (!seen.contains({ev, img}) && !stored.contains({ev, img})) {
                         throw HttpError{400, "incomplete task: image " + img + " not scored"};
                       }
                     }
                   }
                 }
               }
               for (const MosRecord& r : records) store_->AppendMos(r);
               Reply(res, 200, Json{{"status", "recorded"}, {"n_records", records.size()}});
             }));

    // Leaderboards and reports.
    srv.Get(prefix + "/leaderboard", Guard([this](const auto& req, auto& res) {
              const Mode mode = ModeParam(req, false).value_or(Mode::kPublic);
              std::string scope = kOverall;
              if (req.has_param("scenario")) {
                const std::string s = req.get_param_value("scenario");
                if (s != kOverall && s != "all") {
                  if (!ParseScenario(s)) throw HttpError{404, "unknown scope: " + s};
                  scope = s;
                }
              }
              const auto snap = snapshot();
              if (!snap) throw HttpError{503, "no fit has completed yet"};
              const FitSnapshot::Scope& sc = snap->scopes.at(ScopeKey(mode, scope));
              Json out{{"mode", ModeName(mode)}, {"scope", scope}, {"baseline", baseline_}};
              if (!sc.board) {
                out["rows"] = Json::array();
                out["eligibility"] = Json::array();
                out["error"] = sc.error;
              } else {
                out["rows"] = LeaderboardJson(sc.board->rows);
                Json el = Json::array();
                for (const EligibilityReport& r : sc.board->eligibility) el.push_back(ToJson(r));
                out["eligibility"] = el;
              }
              Reply(res, 200, out);
            }));
    srv.Get(prefix + "/reports/mos", Guard([this](const auto&, auto& res) {
              const std::vector<MosRecord> mos = store_->Mos();
              std::vector<ModelId> ids;
              for (const ModelEntry& m : models_) ids.push_back(m.model_id);
              Json out = MosReport(mos, images_, benchmark_, ids);
              std::map<EvaluatorId, std::vector<MosRecord>> by_evaluator;
              for (const MosRecord& r : mos) by_evaluator[r.evaluator_id].push_back(r);
              Json corr = Json::array();
              for (const auto& [id, recs] : by_evaluator) {
                if (recs.size() < 3) continue;
                corr.push_back(CorrelationJson(id, InterdimCorrelation(recs), recs.size()));
              }
              out["correlations"] = corr;
              Reply(res, 200, out);
            }));
    srv.Get(prefix + "/reports/weights", Guard([this](const auto& req, auto& res) {
              StratifiedOptions opts;
              const std::string strata =
                  req.has_param("strata") ? req.get_param_value("strata") : "none";
              if (strata == "none") {
                opts.strata = Strata::kNone;
              } else if (strata == "persona") {
                opts.strata = Strata::kPersona;
              } else if (strata == "scenario") {
                opts.strata = Strata::kScenario;
              } else {
                throw HttpError{404, "unknown strata: " + strata};
              }
              if (req.has_param("min_rows")) {
                opts.min_rows = std::stoll(req.get_param_value("min_rows"));
              }
              const std::optional<Mode> mode = ModeParam(req, true);
              std::map<EvaluatorId, Persona> personas;
              std::vector<EvaluatorProfile> profiles;
              {
                std::lock_guard lock(mu_);
                for (const auto& [id, p] : profiles_) {
                  personas[id] = p.persona;
                  profiles.push_back(p);
                }
              }
              const std::vector<MatchRecord> matches = ApplyFlags(store_->Matches(mode), profiles);
              const MosLookup lookup(store_->Mos(), images_);
              const auto reports = StratifiedReport(matches, lookup, opts, personas, &benchmark_);
              Reply(res, 200,
                    Json{{"strata", strata},
                         {"mode", mode ? std::string(ModeName(*mode)) : "all"},
                         {"reports", WeightReportsJson(reports)}});
            }));
    srv.Get(prefix + "/reports/qc", Guard([this](const auto&, auto& res) {
              std::vector<EvaluatorProfile> profiles;
              {
                std::lock_guard lock(mu_);
                for (const auto& [id, p] : profiles_) profiles.push_back(p);
              }
              Reply(res, 200, ToJson(RunQc(store_->Matches(), anchors_, profiles, config_.qc)));
            }));
    srv.Get(prefix + "/reports/prompt-elo", Guard([this](const auto& req, auto& res) {
              if (!req.has_param("model")) throw HttpError{400, "missing model parameter"};
              const Mode mode = ModeParam(req, false).value_or(Mode::kPublic);
              std::vector<EvaluatorProfile> profiles;
              {
                std::lock_guard lock(mu_);
                for (const auto& [id, p] : profiles_) profiles.push_back(p);
              }
              const auto matches = ApplyFlags(store_->Matches(mode), profiles);
              Reply(res, 200,
                    ToJson(PromptEloContributions(matches, baseline_,
                                                  req.get_param_value("model"))));
            }));
    srv.Get(prefix + "/export/matches", Guard([this](const auto& req, auto& res) {
              std::string out;
              for (const MatchRecord& m : store_->Matches(ModeParam(req, true))) {
                out += ToJson(m).dump();
                out += '\n';
              }
              res.status = 200;
              res.set_content(out, "application/x-ndjson");
            }));
    srv.Get(prefix + "/rubric", Guard([this](const auto&, auto& res) {
              if (rubric_.is_null()) throw HttpError{404, "no rubric configured"};
              Reply(res, 200, rubric_);
            }));

    // Administration.
    srv.Post(prefix + "/admin/refit", Guard([this](const auto&, auto& res) {
               const auto snap = Refit();
               Reply(res, 200,
                     Json{{"generation", snap->generation}, {"seconds", snap->seconds}});
             }));
    srv.Post(prefix + "/admin/compact", Guard([this](const auto&, auto& res) {
               store_->Compact();
               Reply(res, 200, Json{{"status", "compacted"}});
             }));
    srv.Get(prefix + "/admin/status", Guard([this](const auto&, auto& res) {
              Json out;
              const auto snap = snapshot();
              out["generation"] = snap ? snap->generation : 0;
              out["last_fit_at"] = snap ? Json(FormatTimestamp(snap->finished_at)) : Json(nullptr);
              out["last_fit_seconds"] = snap ? Json(snap->seconds) : Json(nullptr);
              out["fit_cadence_s"] = config_.fit_cadence_s;
              out["matches"] = {{"expert", store_->Matches(Mode::kExpert).size()},
                                {"public", store_->Matches(Mode::kPublic).size()}};
              out["mos_records"] = store_->Mos().size();
              out["images"] = images_.size();
              out["prompts"] = benchmark_.size();
              std::lock_guard lock(mu_);
              out["evaluators"] = profiles_.size();
              out["pending_assignments"] = pending_.size();
              out["scheduler"] = ToJson(config_.scheduler);
              Reply(res, 200, out);
            }));
  }
}

}  // namespace arena
