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

// Match scheduling: which two models, which prompt, which samples.

#ifndef ARENA_SCHEDULER_H_
#define ARENA_SCHEDULER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arena/benchmark.h"
#include "arena/json_io.h"
#include "arena/rating.h"
#include "arena/types.h"

namespace arena {

enum class SchedulingPolicy { kWeighted, kUniform };

struct SchedulerConfig {
  double alpha = 0.5;         // weight of the under-matched term
  double anchor_rate = 0.05;  // in [0, 0.5]
  uint64_t seed = 0;
  SchedulingPolicy policy = SchedulingPolicy::kWeighted;
};

// Throws kValidation for out-of-range values.
void ValidateSchedulerConfig(const SchedulerConfig& config);
SchedulerConfig SchedulerConfigFromJson(const Json& j);
Json ToJson(const SchedulerConfig& config);

// Unordered model pair, first < second.
using ModelPair = std::pair<ModelId, ModelId>;
ModelPair MakePair(const ModelId& a, const ModelId& b);

// Lower bound on the closeness term so that decided pairs keep being drawn.
inline constexpr double kClosenessFloor = 0.01;

struct SchedulerState {
  std::vector<ModelId> models;
  std::map<ModelPair, int64_t> pair_counts;
  std::optional<BtFit> current_fit;
  std::vector<AnchorPair> anchors;
  SchedulerConfig config;
  int64_t issued = 0;

  int64_t PairCount(const ModelId& a, const ModelId& b) const;
  void RecordPair(const ModelId& a, const ModelId& b, int64_t n = 1);
};

// Normalized selection weights over all unordered pairs of `models`, in
// lexicographic pair order:
//
//   weight(p) = alpha * u(p) + (1 - alpha) * c(p)
//
// u(p) is (1 + n_p)^-1 normalized over pairs; c(p) is
// max(1 - 2 |p_hat - 0.5|, kClosenessFloor) normalized over pairs, with
// p_hat = sigmoid(xi_a - xi_b) from the current fit. Without a fit c is
// uniform; a model missing from the fit counts as maximally uncertain.
// Under SchedulingPolicy::kUniform every pair gets the same weight.
std::vector<std::pair<ModelPair, double>> PairWeights(const SchedulerState& state,
                                                      std::span<const ModelId> models);

struct MatchAssignment {
  std::string assignment_id;
  ModelId model_left;
  ModelId model_right;
  PromptId prompt_id;
  ImageId image_left;
  ImageId image_right;
  bool is_anchor = false;
  std::string anchor_id;
  // For anchors: true when image_left is the verified better image.
  bool anchor_good_on_left = false;
};

// Draws the next assignment and records the pair in state.pair_counts.
// With probability anchor_rate an anchor from the pool is served (an empty
// pool falls through to a regular draw with a warning). Throws kNotFound
// naming (model, prompt) when a drawn pair lacks images, and
// kInvalidArgument with fewer than two models or an empty benchmark.
MatchAssignment NextMatch(SchedulerState& state, const Benchmark& benchmark,
                          const ImageStore& images, std::mt19937_64& rng);

// Evaluator-facing view: assignment id, prompt and the two images. Carries
// no model identifiers and no anchor marker.
Json AnonymizedProjection(const MatchAssignment& assignment, const Benchmark& benchmark,
                          const ImageStore& images);

}  // namespace arena

#endif  // ARENA_SCHEDULER_H_
