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

// Synthetic arenas with planted ground truth.
//
// A SimWorld holds a benchmark, generated image records with planted
// quality, anchors and an evaluator population. Tournaments, MOS sheets and
// preference votes are drawn from it with independent seeded streams, so a
// fixed config always yields byte-identical outputs.

#ifndef ARENA_SIMULATOR_H_
#define ARENA_SIMULATOR_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "arena/benchmark.h"
#include "arena/joint_analysis.h"
#include "arena/json_io.h"
#include "arena/scheduler.h"
#include "arena/types.h"

namespace arena {

enum class CheaterProfile { kNone, kSpeed, kRepetition, kAnchorBlind };

std::string_view CheaterProfileName(CheaterProfile c);
std::optional<CheaterProfile> ParseCheaterProfile(std::string_view s);

struct SimModel {
  ModelId model_id;
  double elo = 1000.0;  // planted
  bool is_baseline = false;
  // Planted mean MOS per dimension; derived from the ELO when absent.
  std::optional<MosTriple> quality;
};

struct SimEvaluatorGroup {
  int count = 1;
  Persona persona = Persona::kGeneralUser;
  Mode mode = Mode::kPublic;
  bool qualified = false;
  double noise_sd = 0.5;  // MOS scoring noise
  // Planted joint-analysis coefficients (nine features).
  std::array<double, kNumJointFeatures> beta{};
  CheaterProfile cheater = CheaterProfile::kNone;
  double duration_mean_s = 15.0;
  double duration_sd_s = 5.0;
  // Log-scale spread of personal speed around the group mean.
  double speed_spread = 0.15;
  double anchor_error = 0.05;  // honest mistakes on anchors
};

struct SimConfig {
  uint64_t seed = 0;
  std::vector<SimModel> models;
  int n_prompts = 40;
  // SD of per-(model, prompt) strength offsets, in ELO points.
  double prompt_offset_sd = 0.0;
  std::vector<SimEvaluatorGroup> evaluators;
  int64_t matches = 10000;
  double tie_rate = 0.1;
  int n_anchors = 20;
  SchedulerConfig scheduler;  // anchor_rate lives here
  // Refit the scheduler's ratings every this many matches; 0 keeps the
  // closeness term uniform throughout.
  int64_t refit_every = 0;
  int samples_per_prompt = 4;
  double mos_prompt_sd = 0.4;  // per-(model, prompt) quality spread
  double mos_sample_sd = 0.3;  // per-sample quality spread
  int64_t preference_matches = 0;
  Timestamp start_time{};
};

// Throws kSchema / kValidation naming the offending field.
SimConfig SimConfigFromJson(const Json& j);
SimConfig LoadSimConfig(const std::filesystem::path& path);

struct SimEvaluator {
  EvaluatorId evaluator_id;
  int group = 0;
  double mean_duration_s = 15.0;
  double sd_duration_s = 5.0;
};

struct SimWorld {
  Benchmark benchmark;
  std::vector<ModelEntry> models;
  ModelId baseline;
  std::map<ModelId, double> planted_elo;
  std::map<ModelId, double> xi;  // planted, baseline at 0
  // offsets[prompt][model], in xi units; zero mean over prompts per model.
  std::map<PromptId, std::map<ModelId, double>> offsets;
  ImageStore images;
  std::map<ImageId, MosTriple> true_quality;
  std::vector<AnchorPair> anchors;
  std::vector<EvaluatorProfile> profiles;
  std::vector<SimEvaluator> evaluators;  // same order as profiles
};

// Benchmark prompts are generated with scenario shares following the
// reference distribution unless `benchmark` is given.
SimWorld BuildWorld(const SimConfig& config, const Benchmark* benchmark = nullptr);

// Draws an outcome for a left-vs-right contest with strength difference
// `delta` (xi units). Ties occur with probability min(tie_rate,
// 2 min(p, 1 - p)) for p = sigmoid(delta), split evenly between both_good
// and both_bad, and the decisive probabilities are set so that the
// expected score (wins + ties / 2) equals p.
Outcome DrawOutcome(double delta, double tie_rate, std::mt19937_64& rng);

// Produces votes for assignments from planted truth; cheaters follow their
// profile. Keeps per-evaluator state (repetition runs).
class Voter {
 public:
  Voter(const SimConfig& config, const SimWorld& world);

  // Fills outcome, evaluator, timing and mode; `index` sets the match id
  // and timestamp.
  MatchRecord Vote(const MatchAssignment& assignment, size_t evaluator, int64_t index,
                   std::mt19937_64& rng);
  // Strength difference left minus right including prompt offsets.
  double Delta(const ModelId& left, const ModelId& right, const PromptId& prompt) const;

 private:
  const SimConfig& config_;
  const SimWorld& world_;
  std::vector<Outcome> last_;
};

std::vector<MatchRecord> SimulateTournament(const SimConfig& config, const SimWorld& world);

// One record per (image, MOS rater). Raters are the evaluators in expert
// mode, or two default raters when there are none. `raw` receives the
// pre-rounding scores in the same order.
std::vector<MosRecord> SimulateMos(const SimConfig& config, const SimWorld& world,
                                   std::vector<MosTriple>* raw = nullptr);

// Matches whose outcomes follow sigmoid(beta . features) of the measured
// per-image MOS, with beta taken from the voting evaluator's group.
std::vector<MatchRecord> SimulatePreferenceMatches(const SimConfig& config,
                                                   const SimWorld& world,
                                                   std::span<const MosRecord> mos);

Json PlantedTruthJson(const SimConfig& config, const SimWorld& world);

}  // namespace arena

#endif  // ARENA_SIMULATOR_H_
