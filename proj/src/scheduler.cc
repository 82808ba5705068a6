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

#include "arena/scheduler.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "arena/error.h"
#include "arena/stats.h"
#include "spdlog/spdlog.h"

namespace arena {

void ValidateSchedulerConfig(const SchedulerConfig& config) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw Error(ErrorCode::kValidation, "scheduler alpha must be in [0, 1]");
  }
  if (!(config.anchor_rate >= 0.0 && config.anchor_rate <= 0.5)) {
    throw Error(ErrorCode::kValidation, "anchor_rate must be in [0, 0.5]");
  }
}

SchedulerConfig SchedulerConfigFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "scheduler config must be an object");
  SchedulerConfig c;
  try {
    c.alpha = j.value("alpha", c.alpha);
    c.anchor_rate = j.value("anchor_rate", c.anchor_rate);
    c.seed = j.value("seed", c.seed);
    const std::string policy = j.value("policy", std::string("weighted"));
    if (policy == "weighted") {
      c.policy = SchedulingPolicy::kWeighted;
    } else if (policy == "uniform") {
      c.policy = SchedulingPolicy::kUniform;
    } else {
      throw Error(ErrorCode::kValidation, "unknown scheduler policy: " + policy);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("scheduler config: ") + e.what());
  }
  ValidateSchedulerConfig(c);
  return c;
}

Json ToJson(const SchedulerConfig& config) {
  Json j;
  j["alpha"] = config.alpha;
  j["anchor_rate"] = config.anchor_rate;
  j["seed"] = config.seed;
  j["policy"] = config.policy == SchedulingPolicy::kWeighted ? "weighted" : "uniform";
  return j;
}

ModelPair MakePair(const ModelId& a, const ModelId& b) {
  return a < b ? ModelPair{a, b} : ModelPair{b, a};
}

int64_t SchedulerState::PairCount(const ModelId& a, const ModelId& b) const {
  auto it = pair_counts.find(MakePair(a, b));
  return it == pair_counts.end() ? 0 : it->second;
}

void SchedulerState::RecordPair(const ModelId& a, const ModelId& b, int64_t n) {
  pair_counts[MakePair(a, b)] += n;
}

std::vector<std::pair<ModelPair, double>> PairWeights(const SchedulerState& state,
                                                      std::span<const ModelId> models) {
  std::vector<ModelId> sorted(models.begin(), models.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pair weights need at least two models");
  }
  std::vector<std::pair<ModelPair, double>> out;
  std::vector<double> u, c;
  for (size_t i = 0; i < sorted.size(); ++i) {
    for (size_t j = i + 1; j < sorted.size(); ++j) {
      out.push_back({{sorted[i], sorted[j]}, 0.0});
      u.push_back(1.0 / (1.0 + static_cast<double>(state.PairCount(sorted[i], sorted[j]))));
      double closeness = 1.0;
      if (state.current_fit) {
        const BtFit& fit = *state.current_fit;
        const int a = fit.Index(sorted[i]), b = fit.Index(sorted[j]);
        if (a >= 0 && b >= 0) {
          const double p = Sigmoid(fit.coefficients[a] - fit.coefficients[b]);
          closeness = std::max(1.0 - 2.0 * std::abs(p - 0.5), kClosenessFloor);
        }
      }
      c.push_back(closeness);
    }
  }
  const double n_pairs = static_cast<double>(out.size());
  if (state.config.policy == SchedulingPolicy::kUniform) {
    for (auto& [pair, w] : out) w = 1.0 / n_pairs;
    return out;
  }
  double su = 0.0, sc = 0.0;
  for (size_t k = 0; k < out.size(); ++k) {
    su += u[k];
    sc += c[k];
  }
  const double alpha = state.config.alpha;
  double total = 0.0;
  for (size_t k = 0; k < out.size(); ++k) {
    out[k].second = alpha * u[k] / su + (1.0 - alpha) * c[k] / sc;
    total += out[k].second;
  }
  for (auto& [pair, w] : out) w /= total;
  return out;
}

namespace {

std::string AssignmentId(uint64_t seed, int64_t counter) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "as_%016llx",
                static_cast<unsigned long long>(DeriveSeed(seed, static_cast<uint64_t>(counter))));
  return buf;
}

const ImageId& DrawSample(const ImageStore& images, const ModelId& model,
                          const PromptId& prompt, std::mt19937_64& rng) {
  const std::span<const ImageId> samples = images.Samples(model, prompt);
  if (samples.empty()) {
    throw Error(ErrorCode::kNotFound,
                "no images for (model " + model + ", prompt " + prompt + ")");
  }
  std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);
  return samples[pick(rng)];
}

}  // namespace

MatchAssignment NextMatch(SchedulerState& state, const Benchmark& benchmark,
                          const ImageStore& images, std::mt19937_64& rng) {
  if (benchmark.empty()) throw Error(ErrorCode::kInvalidArgument, "empty benchmark");
  MatchAssignment out;
  out.assignment_id = AssignmentId(state.config.seed, state.issued++);
  std::bernoulli_distribution coin(0.5);

  std::bernoulli_distribution anchor_draw(state.config.anchor_rate);
  if (anchor_draw(rng)) {
    if (state.anchors.empty()) {
      spdlog::warn("anchor draw with an empty anchor pool; serving a regular match");
    } else {
      std::uniform_int_distribution<size_t> pick(0, state.anchors.size() - 1);
      const AnchorPair& anchor = state.anchors[pick(rng)];
      out.is_anchor = true;
      out.anchor_id = anchor.anchor_id;
      out.prompt_id = anchor.prompt_id;
      out.anchor_good_on_left = coin(rng);
      out.image_left = out.anchor_good_on_left ? anchor.image_good : anchor.image_bad;
      out.image_right = out.anchor_good_on_left ? anchor.image_bad : anchor.image_good;
      const GeneratedImage* l = images.Find(out.image_left);
      const GeneratedImage* r = images.Find(out.image_right);
      if (l && r && l->model_id != r->model_id) {
        out.model_left = l->model_id;
        out.model_right = r->model_id;
      } else {
        // Anchor images outside the store (or from one model) get
        // placeholder identities; anchors never enter a rating fit.
        out.model_left = out.anchor_good_on_left ? "anchor:good" : "anchor:bad";
        out.model_right = out.anchor_good_on_left ? "anchor:bad" : "anchor:good";
      }
      return out;
    }
  }

  const auto weights = PairWeights(state, state.models);
  std::vector<double> w;
  w.reserve(weights.size());
  for (const auto& [pair, weight] : weights) w.push_back(weight);
  std::discrete_distribution<size_t> pair_draw(w.begin(), w.end());
  const ModelPair& pair = weights[pair_draw(rng)].first;

  std::uniform_int_distribution<size_t> prompt_draw(0, benchmark.size() - 1);
  out.prompt_id = benchmark.prompts()[prompt_draw(rng)].prompt_id;
  const ImageId& first = DrawSample(images, pair.first, out.prompt_id, rng);
  const ImageId& second = DrawSample(images, pair.second, out.prompt_id, rng);
  if (coin(rng)) {
    out.model_left = pair.first;
    out.model_right = pair.second;
    out.image_left = first;
    out.image_right = second;
  } else {
    out.model_left = pair.second;
    out.model_right = pair.first;
    out.image_left = second;
    out.image_right = first;
  }
  state.RecordPair(pair.first, pair.second);
  return out;
}

Json AnonymizedProjection(const MatchAssignment& assignment, const Benchmark& benchmark,
                          const ImageStore& images) {
  Json j;
  j["assignment_id"] = assignment.assignment_id;
  j["prompt_id"] = assignment.prompt_id;
  const PromptItem* prompt = benchmark.Find(assignment.prompt_id);
  j["prompt_text"] = prompt ? prompt->text : std::string();
  auto image = [&](const ImageId& id) {
    Json i;
    i["image_id"] = id;
    const GeneratedImage* g = images.Find(id);
    i["uri"] = g ? g->uri : std::string();
    return i;
  };
  j["image_left"] = image(assignment.image_left);
  j["image_right"] = image(assignment.image_right);
  return j;
}

}  // namespace arena
