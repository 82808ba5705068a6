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

#include "arena/simulator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "arena/error.h"
#include "arena/rating.h"
#include "arena/stats.h"
#include "spdlog/spdlog.h"

namespace arena {
namespace {

// Stream indices for DeriveSeed; each output has its own stream.
enum Stream : uint64_t {
  kPromptStream = 1,
  kQualityStream = 2,
  kOffsetStream = 3,
  kAnchorStream = 4,
  kEvaluatorStream = 5,
  kImageIdStream = 6,
  kTournamentStream = 10,
  kMosStream = 11,
  kPreferenceStream = 12,
};

constexpr double kSpeedCheaterMeanS = 3.0;
constexpr double kSpeedCheaterSdS = 1.0;
constexpr double kMinDurationS = 0.5;
constexpr double kRepetitionSwitchRate = 0.02;

std::string Hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string Numbered(const char* prefix, int64_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width, static_cast<long long>(i));
  return buf;
}

template <typename T>
T Field(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kSchema, where + ": field '" + key + "' has the wrong type");
  }
}

Outcome UniformOutcome(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  return static_cast<Outcome>(pick(rng));
}

double DrawDuration(double mean, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> d(mean, sd);
  return std::max(kMinDurationS, d(rng));
}

Timestamp At(const SimConfig& config, int64_t index) {
  return config.start_time + std::chrono::milliseconds(1000 * index);
}

Benchmark GenerateBenchmark(const SimConfig& config) {
  const DistributionSpec ref = ReferenceDistribution();
  const int n = config.n_prompts;
  // Largest-remainder allocation of scenario counts.
  std::vector<std::pair<Scenario, int>> counts;
  std::vector<std::pair<double, size_t>> remainders;
  int assigned = 0;
  for (Scenario s : kAllScenarios) {
    const double exact = ref.scenario.at(s) * n;
    const int base = static_cast<int>(std::floor(exact));
    counts.push_back({s, base});
    remainders.push_back({exact - base, counts.size() - 1});
    assigned += base;
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; assigned < n; ++k, ++assigned) ++counts[remainders[k].second].second;

  std::mt19937_64 rng(DeriveSeed(config.seed, kPromptStream));
  std::vector<Scenario> scenarios;
  for (const auto& [s, c] : counts) scenarios.insert(scenarios.end(), c, s);
  std::shuffle(scenarios.begin(), scenarios.end(), rng);

  std::vector<PromptItem> prompts;
  for (int i = 0; i < n; ++i) {
    PromptItem p;
    p.prompt_id = Numbered("p", i + 1, 4);
    p.scenario_label = scenarios[i];
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& [cap, rate] : ref.capability) {
      if (u(rng) < rate) p.capability_labels.insert(cap);
    }
    if (p.capability_labels.empty()) p.capability_labels.insert(Capability::kStyle);
    while (p.capability_labels.size() > 4) {
      std::uniform_int_distribution<size_t> drop(0, p.capability_labels.size() - 1);
      p.capability_labels.erase(std::next(p.capability_labels.begin(), drop(rng)));
    }
    p.text = "Synthetic " + std::string(ScenarioName(p.scenario_label)) + " prompt " +
             std::to_string(i + 1);
    for (Capability c : p.capability_labels) {
      p.test_points.push_back({c, "Check " + std::string(CapabilityName(c))});
    }
    prompts.push_back(std::move(p));
  }
  return Benchmark(std::move(prompts), ref);
}

std::array<double, kNumJointFeatures> BetaFromJson(const Json& g, const std::string& where) {
  std::array<double, kNumJointFeatures> beta{};
  if (g.contains("beta") && g.contains("increments")) {
    throw Error(ErrorCode::kValidation, where + ": give either beta or increments");
  }
  if (g.contains("beta")) {
    const auto v = Field<std::vector<double>>(g, "beta", {}, where);
    if (v.size() != kNumJointFeatures) {
      throw Error(ErrorCode::kValidation, where + ": beta needs 9 entries");
    }
    std::copy(v.begin(), v.end(), beta.begin());
  } else if (g.contains("increments")) {
    const auto v = Field<std::vector<double>>(g, "increments", {}, where);
    if (v.size() != 3) throw Error(ErrorCode::kValidation, where + ": increments needs 3 entries");
    for (int d = 0; d < 3; ++d) {
      if (!(v[d] > -50.0 && v[d] < 50.0)) {
        throw Error(ErrorCode::kValidation, where + ": increments must be in (-50, 50)");
      }
      beta[d] = Logit(0.5 + v[d] / 100.0);
    }
  }
  return beta;
}

}  // namespace

std::string_view CheaterProfileName(CheaterProfile c) {
  switch (c) {
    case CheaterProfile::kNone: return "none";
    case CheaterProfile::kSpeed: return "speed";
    case CheaterProfile::kRepetition: return "repetition";
    case CheaterProfile::kAnchorBlind: return "anchor_blind";
  }
  return "none";
}

std::optional<CheaterProfile> ParseCheaterProfile(std::string_view s) {
  for (CheaterProfile c : {CheaterProfile::kNone, CheaterProfile::kSpeed,
                           CheaterProfile::kRepetition, CheaterProfile::kAnchorBlind}) {
    if (CheaterProfileName(c) == s) return c;
  }
  return std::nullopt;
}

SimConfig SimConfigFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "sim config must be a JSON object");
  SimConfig c;
  const std::string where = "sim config";
  c.seed = Field<uint64_t>(j, "seed", 0, where);
  if (!j.contains("models") || !j.at("models").is_array()) {
    throw Error(ErrorCode::kSchema, "sim config: missing array field 'models'");
  }
  for (size_t i = 0; i < j.at("models").size(); ++i) {
    const Json& m = j.at("models")[i];
    const std::string mw = "models[" + std::to_string(i) + "]";
    if (!m.is_object() || !m.contains("model_id")) {
      throw Error(ErrorCode::kSchema, mw + ": missing field 'model_id'");
    }
    SimModel sm;
    sm.model_id = Field<std::string>(m, "model_id", "", mw);
    sm.elo = Field<double>(m, "elo", 1000.0, mw);
    sm.is_baseline = Field<bool>(m, "is_baseline", false, mw);
    if (m.contains("quality")) {
      const auto q = Field<std::vector<double>>(m, "quality", {}, mw);
      if (q.size() != 3) throw Error(ErrorCode::kValidation, mw + ": quality needs 3 entries");
      sm.quality = MosTriple{q[0], q[1], q[2]};
    }
    c.models.push_back(sm);
  }
  if (c.models.size() < 2) throw Error(ErrorCode::kValidation, "sim config: need >= 2 models");
  if (std::none_of(c.models.begin(), c.models.end(), [](auto& m) { return m.is_baseline; })) {
    auto lowest = std::min_element(c.models.begin(), c.models.end(),
                                   [](auto& a, auto& b) { return a.elo < b.elo; });
    lowest->is_baseline = true;
  }
  c.n_prompts = Field<int>(j, "prompts", c.n_prompts, where);
  if (c.n_prompts < 1) throw Error(ErrorCode::kValidation, "sim config: prompts must be >= 1");
  c.prompt_offset_sd = Field<double>(j, "prompt_offset_sd", c.prompt_offset_sd, where);
  if (j.contains("evaluators")) {
    const Json& evs = j.at("evaluators");
    if (!evs.is_array()) throw Error(ErrorCode::kSchema, "sim config: evaluators must be an array");
    for (size_t i = 0; i < evs.size(); ++i) {
      const Json& g = evs[i];
      const std::string gw = "evaluators[" + std::to_string(i) + "]";
      if (!g.is_object()) throw Error(ErrorCode::kSchema, gw + ": must be an object");
      SimEvaluatorGroup e;
      e.count = Field<int>(g, "count", e.count, gw);
      const std::string persona = Field<std::string>(g, "persona", "general_user", gw);
      const std::string mode = Field<std::string>(g, "mode", "public", gw);
      const std::string cheater = Field<std::string>(g, "cheater", "none", gw);
      auto p = ParsePersona(persona);
      auto md = ParseMode(mode);
      auto ch = ParseCheaterProfile(cheater);
      if (!p) throw Error(ErrorCode::kValidation, gw + ": unknown persona " + persona);
      if (!md) throw Error(ErrorCode::kValidation, gw + ": unknown mode " + mode);
      if (!ch) throw Error(ErrorCode::kValidation, gw + ": unknown cheater profile " + cheater);
      e.persona = *p;
      e.mode = *md;
      e.cheater = *ch;
      e.qualified = Field<bool>(g, "qualified", e.mode == Mode::kExpert, gw);
      e.noise_sd = Field<double>(g, "noise_sd", e.noise_sd, gw);
      e.beta = BetaFromJson(g, gw);
      e.duration_mean_s = Field<double>(g, "duration_mean_s", e.duration_mean_s, gw);
      e.duration_sd_s = Field<double>(g, "duration_sd_s", e.duration_sd_s, gw);
      e.speed_spread = Field<double>(g, "speed_spread", e.speed_spread, gw);
      e.anchor_error = Field<double>(g, "anchor_error", e.anchor_error, gw);
      if (e.count < 1 || e.noise_sd < 0 || e.duration_mean_s <= 0 || e.duration_sd_s < 0 ||
          e.speed_spread < 0 || e.anchor_error < 0 || e.anchor_error > 1) {
        throw Error(ErrorCode::kValidation, gw + ": parameter out of range");
      }
      c.evaluators.push_back(e);
    }
  }
  c.matches = Field<int64_t>(j, "matches", c.matches, where);
  c.tie_rate = Field<double>(j, "tie_rate", c.tie_rate, where);
  if (c.matches < 0 || c.tie_rate < 0 || c.tie_rate > 1) {
    throw Error(ErrorCode::kValidation, "sim config: matches or tie_rate out of range");
  }
  c.n_anchors = Field<int>(j, "anchors", c.n_anchors, where);
  if (j.contains("scheduler")) c.scheduler = SchedulerConfigFromJson(j.at("scheduler"));
  if (!j.contains("scheduler") || !j.at("scheduler").contains("seed")) {
    c.scheduler.seed = c.seed;
  }
  if (j.contains("anchor_rate")) {
    c.scheduler.anchor_rate = Field<double>(j, "anchor_rate", 0.05, where);
    ValidateSchedulerConfig(c.scheduler);
  }
  c.refit_every = Field<int64_t>(j, "refit_every", c.refit_every, where);
  if (c.refit_every < 0) throw Error(ErrorCode::kValidation, "sim config: refit_every < 0");
  c.samples_per_prompt = Field<int>(j, "samples_per_prompt", c.samples_per_prompt, where);
  if (c.samples_per_prompt < 1 || c.samples_per_prompt > 4) {
    throw Error(ErrorCode::kValidation, "sim config: samples_per_prompt must be in [1, 4]");
  }
  c.mos_prompt_sd = Field<double>(j, "mos_prompt_sd", c.mos_prompt_sd, where);
  c.mos_sample_sd = Field<double>(j, "mos_sample_sd", c.mos_sample_sd, where);
  c.preference_matches = Field<int64_t>(j, "preference_matches", c.preference_matches, where);
  const std::string start = Field<std::string>(j, "start_time", "2026-01-01T00:00:00Z", where);
  auto t = ParseTimestamp(start);
  if (!t) throw Error(ErrorCode::kValidation, "sim config: bad start_time " + start);
  c.start_time = *t;
  return c;
}

SimConfig LoadSimConfig(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  return SimConfigFromJson(j);
}

SimWorld BuildWorld(const SimConfig& config, const Benchmark* benchmark) {
  if (config.models.size() < 2) throw Error(ErrorCode::kValidation, "need >= 2 models");
  SimWorld w;
  w.benchmark = benchmark ? *benchmark : GenerateBenchmark(config);
  double elo_mean = 0.0;
  for (const SimModel& m : config.models) {
    w.models.push_back({m.model_id, m.model_id, m.is_baseline});
    elo_mean += m.elo / static_cast<double>(config.models.size());
  }
  w.baseline = ValidateModelEntries(w.models);
  double base_elo = 0.0;
  for (const SimModel& m : config.models) {
    if (m.model_id == w.baseline) base_elo = m.elo;
  }
  for (const SimModel& m : config.models) {
    w.planted_elo[m.model_id] = m.elo;
    w.xi[m.model_id] = (m.elo - base_elo) / kEloScale;
  }

  // Per-(model, prompt) offsets, centered per model.
  std::mt19937_64 off_rng(DeriveSeed(config.seed, kOffsetStream));
  std::normal_distribution<double> off(0.0, config.prompt_offset_sd / kEloScale);
  for (const SimModel& m : config.models) {
    std::vector<double> d;
    for (size_t i = 0; i < w.benchmark.size(); ++i) {
      d.push_back(config.prompt_offset_sd > 0 ? off(off_rng) : 0.0);
    }
    const double mean = Mean(d);
    for (size_t i = 0; i < d.size(); ++i) {
      w.offsets[w.benchmark.prompts()[i].prompt_id][m.model_id] = d[i] - mean;
    }
  }

  // Images with planted quality and opaque ids.
  std::mt19937_64 q_rng(DeriveSeed(config.seed, kQualityStream));
  std::normal_distribution<double> prompt_q(0.0, config.mos_prompt_sd);
  std::normal_distribution<double> sample_q(0.0, config.mos_sample_sd);
  const uint64_t id_seed = DeriveSeed(config.seed, kImageIdStream);
  std::vector<GeneratedImage> images;
  uint64_t counter = 0;
  for (const SimModel& m : config.models) {
    MosTriple base;
    if (m.quality) {
      base = *m.quality;
    } else {
      const double q = std::clamp(3.4 + (m.elo - elo_mean) / 250.0, 1.5, 4.7);
      base = {q, q, q};
    }
    for (const PromptItem& p : w.benchmark.prompts()) {
      MosTriple pm;
      for (int d = 0; d < 3; ++d) pm[d] = base[d] + prompt_q(q_rng);
      for (int s = 1; s <= config.samples_per_prompt; ++s) {
        GeneratedImage g;
        g.image_id = "img_" + Hex16(DeriveSeed(id_seed, counter++));
        g.model_id = m.model_id;
        g.prompt_id = p.prompt_id;
        g.sample_index = s;
        g.uri = "store://images/" + g.image_id + ".png";
        MosTriple t;
        for (int d = 0; d < 3; ++d) t[d] = pm[d] + sample_q(q_rng);
        w.true_quality[g.image_id] = t;
        images.push_back(std::move(g));
      }
    }
  }
  w.images = ImageStore(std::move(images));

  // Anchors: strongest model's sample against the weakest model's sample.
  auto [lo, hi] = std::minmax_element(config.models.begin(), config.models.end(),
                                      [](auto& a, auto& b) { return a.elo < b.elo; });
  std::mt19937_64 a_rng(DeriveSeed(config.seed, kAnchorStream));
  std::uniform_int_distribution<size_t> prompt_pick(0, w.benchmark.size() - 1);
  std::set<std::pair<ImageId, ImageId>> used;
  for (int i = 0; i < config.n_anchors; ++i) {
    const PromptId& p = w.benchmark.prompts()[prompt_pick(a_rng)].prompt_id;
    auto good = w.images.Samples(hi->model_id, p);
    auto bad = w.images.Samples(lo->model_id, p);
    std::uniform_int_distribution<size_t> sg(0, good.size() - 1), sb(0, bad.size() - 1);
    AnchorPair a{Numbered("anc_", i + 1, 4), p, good[sg(a_rng)], bad[sb(a_rng)]};
    if (!used.insert({a.image_good, a.image_bad}).second) continue;
    w.anchors.push_back(a);
  }

  // Evaluators.
  std::vector<SimEvaluatorGroup> groups = config.evaluators;
  if (groups.empty()) groups.push_back(SimEvaluatorGroup{.count = 20});
  std::mt19937_64 e_rng(DeriveSeed(config.seed, kEvaluatorStream));
  std::normal_distribution<double> spread(0.0, 1.0);
  int index = 0;
  for (size_t g = 0; g < groups.size(); ++g) {
    for (int k = 0; k < groups[g].count; ++k) {
      SimEvaluator e;
      e.evaluator_id = Numbered("ev_", ++index, 4);
      e.group = static_cast<int>(g);
      const double factor = std::exp(groups[g].speed_spread * spread(e_rng));
      e.mean_duration_s = groups[g].duration_mean_s * factor;
      e.sd_duration_s = groups[g].duration_sd_s * factor;
      EvaluatorProfile p;
      p.evaluator_id = e.evaluator_id;
      p.mode = groups[g].mode;
      p.persona = groups[g].persona;
      p.qualified = groups[g].qualified;
      w.profiles.push_back(p);
      w.evaluators.push_back(e);
    }
  }
  return w;
}

Outcome DrawOutcome(double delta, double tie_rate, std::mt19937_64& rng) {
  const double p = Sigmoid(delta);
  const double tie = std::min(tie_rate, 2.0 * std::min(p, 1.0 - p));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  if (r < p - tie / 2.0) return Outcome::kLeftWins;
  if (r < p + tie / 2.0) return r < p ? Outcome::kBothGood : Outcome::kBothBad;
  return Outcome::kRightWins;
}

Voter::Voter(const SimConfig& config, const SimWorld& world)
    : config_(config),
      world_(world),
      last_(world.evaluators.size(), Outcome::kLeftWins) {}

double Voter::Delta(const ModelId& left, const ModelId& right, const PromptId& prompt) const {
  double d = world_.xi.at(left) - world_.xi.at(right);
  auto it = world_.offsets.find(prompt);
  if (it != world_.offsets.end()) d += it->second.at(left) - it->second.at(right);
  return d;
}

MatchRecord Voter::Vote(const MatchAssignment& a, size_t evaluator, int64_t index,
                        std::mt19937_64& rng) {
  const SimEvaluator& ev = world_.evaluators.at(evaluator);
  const SimEvaluatorGroup default_group{.count = 20};
  const SimEvaluatorGroup& g =
      config_.evaluators.empty() ? default_group : config_.evaluators[ev.group];
  MatchRecord r;
  r.match_id = Numbered("m", index + 1, 8);
  r.model_left = a.model_left;
  r.model_right = a.model_right;
  r.prompt_id = a.prompt_id;
  r.image_left = a.image_left;
  r.image_right = a.image_right;
  r.is_anchor = a.is_anchor;
  r.evaluator_id = ev.evaluator_id;
  r.mode = g.mode;
  r.submitted_at = At(config_, index);

  switch (g.cheater) {
    case CheaterProfile::kNone:
      if (a.is_anchor) {
        const Outcome good = a.anchor_good_on_left ? Outcome::kLeftWins : Outcome::kRightWins;
        std::bernoulli_distribution mistake(g.anchor_error);
        if (mistake(rng)) {
          std::uniform_int_distribution<int> other(1, 3);
          r.outcome = static_cast<Outcome>((static_cast<int>(good) + other(rng)) % 4);
        } else {
          r.outcome = good;
        }
      } else {
        r.outcome = DrawOutcome(Delta(a.model_left, a.model_right, a.prompt_id),
                                config_.tie_rate, rng);
      }
      break;
    case CheaterProfile::kSpeed:
    case CheaterProfile::kAnchorBlind:
      r.outcome = UniformOutcome(rng);
      break;
    case CheaterProfile::kRepetition: {
      std::bernoulli_distribution change(kRepetitionSwitchRate);
      if (change(rng)) last_[evaluator] = UniformOutcome(rng);
      r.outcome = last_[evaluator];
      break;
    }
  }
  r.duration_s = g.cheater == CheaterProfile::kSpeed
                     ? DrawDuration(kSpeedCheaterMeanS, kSpeedCheaterSdS, rng)
                     : DrawDuration(ev.mean_duration_s, ev.sd_duration_s, rng);
  return r;
}

std::vector<MatchRecord> SimulateTournament(const SimConfig& config, const SimWorld& world) {
  SchedulerState state;
  for (const ModelEntry& m : world.models) state.models.push_back(m.model_id);
  state.anchors = world.anchors;
  state.config = config.scheduler;
  std::mt19937_64 rng(DeriveSeed(config.seed, kTournamentStream));
  Voter voter(config, world);
  std::uniform_int_distribution<size_t> pick(0, world.evaluators.size() - 1);
  std::vector<MatchRecord> out;
  out.reserve(static_cast<size_t>(config.matches));
  for (int64_t i = 0; i < config.matches; ++i) {
    if (config.refit_every > 0 && i > 0 && i % config.refit_every == 0) {
      const OutcomeTable table = BuildOutcomeTable(out, ExcludeAnchors());
      try {
        state.current_fit = FitBt(table, world.baseline);
      } catch (const Error& e) {
        spdlog::debug("scheduler refit skipped at {}: {}", i, e.what());
      }
    }
    const MatchAssignment a = NextMatch(state, world.benchmark, world.images, rng);
    out.push_back(voter.Vote(a, pick(rng), i, rng));
  }
  return out;
}

std::vector<MosRecord> SimulateMos(const SimConfig& config, const SimWorld& world,
                                   std::vector<MosTriple>* raw) {
  struct Rater {
    EvaluatorId id;
    double noise_sd;
  };
  std::vector<Rater> raters;
  for (size_t i = 0; i < world.evaluators.size(); ++i) {
    if (config.evaluators.empty()) break;
    const SimEvaluatorGroup& g = config.evaluators[world.evaluators[i].group];
    if (g.mode == Mode::kExpert) raters.push_back({world.evaluators[i].evaluator_id, g.noise_sd});
  }
  if (raters.empty()) raters = {{"mos_rater_1", 0.5}, {"mos_rater_2", 0.5}};
  std::mt19937_64 rng(DeriveSeed(config.seed, kMosStream));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<MosRecord> out;
  out.reserve(world.images.size() * raters.size());
  if (raw) raw->clear();
  int64_t index = 0;
  for (const GeneratedImage& image : world.images.images()) {
    const MosTriple& truth = world.true_quality.at(image.image_id);
    for (const Rater& rater : raters) {
      MosRecord r;
      r.evaluator_id = rater.id;
      r.image_id = image.image_id;
      r.submitted_at = At(config, index++);
      MosTriple x;
      for (int d = 0; d < 3; ++d) {
        x[d] = truth[d] + rater.noise_sd * unit(rng);
        r.scores[d] = static_cast<int>(std::clamp(std::round(x[d]), 1.0, 5.0));
      }
      if (raw) raw->push_back(x);
      out.push_back(r);
    }
  }
  return out;
}

std::vector<MatchRecord> SimulatePreferenceMatches(const SimConfig& config,
                                                   const SimWorld& world,
                                                   std::span<const MosRecord> mos) {
  const MosLookup lookup(mos, world.images);
  const Standardization standard = ComputeStandardization(lookup);
  std::mt19937_64 rng(DeriveSeed(config.seed, kPreferenceStream));
  const size_t n_models = world.models.size();
  std::uniform_int_distribution<size_t> model_pick(0, n_models - 1);
  std::uniform_int_distribution<size_t> other_pick(0, n_models - 2);
  std::uniform_int_distribution<size_t> prompt_pick(0, world.benchmark.size() - 1);
  std::uniform_int_distribution<size_t> evaluator_pick(0, world.evaluators.size() - 1);
  std::bernoulli_distribution coin(0.5);
  const SimEvaluatorGroup default_group{.count = 20};
  std::vector<MatchRecord> out;
  out.reserve(static_cast<size_t>(config.preference_matches));
  for (int64_t i = 0; i < config.preference_matches; ++i) {
    const size_t a = model_pick(rng);
    size_t b = other_pick(rng);
    if (b >= a) ++b;
    const PromptId& prompt = world.benchmark.prompts()[prompt_pick(rng)].prompt_id;
    const ModelId& ma = world.models[a].model_id;
    const ModelId& mb = world.models[b].model_id;
    auto sa = world.images.Samples(ma, prompt);
    auto sb = world.images.Samples(mb, prompt);
    std::uniform_int_distribution<size_t> pa(0, sa.size() - 1), pb(0, sb.size() - 1);
    const ImageId& ia = sa[pa(rng)];
    const ImageId& ib = sb[pb(rng)];
    const bool a_left = coin(rng);
    const size_t e = evaluator_pick(rng);
    const SimEvaluator& ev = world.evaluators[e];
    const SimEvaluatorGroup& g =
        config.evaluators.empty() ? default_group : config.evaluators[ev.group];

    MatchRecord r;
    r.match_id = Numbered("pm", i + 1, 8);
    r.model_left = a_left ? ma : mb;
    r.model_right = a_left ? mb : ma;
    r.image_left = a_left ? ia : ib;
    r.image_right = a_left ? ib : ia;
    r.prompt_id = prompt;
    r.evaluator_id = ev.evaluator_id;
    r.mode = g.mode;
    r.submitted_at = At(config, i);
    const auto ql = lookup.Find(r.image_left, r.model_left, prompt);
    const auto qr = lookup.Find(r.image_right, r.model_right, prompt);
    if (!ql || !qr) {
      throw Error(ErrorCode::kValidation, "preference simulation needs MOS for every image");
    }
    // Linear predictor for "left beats right"; antisymmetric features make
    // this orientation-independent.
    const JointFeatures f = ComputeJointFeatures(standard.Apply(*ql), standard.Apply(*qr));
    double eta = 0.0;
    for (int k = 0; k < kNumJointFeatures; ++k) eta += g.beta[k] * f[k];
    r.outcome = DrawOutcome(eta, config.tie_rate, rng);
    r.duration_s = DrawDuration(ev.mean_duration_s, ev.sd_duration_s, rng);
    out.push_back(std::move(r));
  }
  return out;
}

Json PlantedTruthJson(const SimConfig& config, const SimWorld& world) {
  Json j;
  j["seed"] = config.seed;
  j["baseline"] = world.baseline;
  j["models"] = Json::array();
  for (const ModelEntry& m : world.models) {
    j["models"].push_back({{"model_id", m.model_id},
                           {"elo", world.planted_elo.at(m.model_id)},
                           {"xi", world.xi.at(m.model_id)}});
  }
  j["evaluators"] = Json::array();
  const SimEvaluatorGroup default_group{.count = 20};
  for (const SimEvaluator& e : world.evaluators) {
    const SimEvaluatorGroup& g =
        config.evaluators.empty() ? default_group : config.evaluators[e.group];
    j["evaluators"].push_back({{"evaluator_id", e.evaluator_id},
                               {"group", e.group},
                               {"persona", PersonaName(g.persona)},
                               {"cheater", CheaterProfileName(g.cheater)},
                               {"mean_duration_s", e.mean_duration_s}});
  }
  return j;
}

}  // namespace arena
