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

// Mean opinion score aggregation, variance, comparison and diagnostics.

#ifndef ARENA_MOS_H_
#define ARENA_MOS_H_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arena/benchmark.h"
#include "arena/json_io.h"
#include "arena/types.h"

namespace arena {

// Scores of one (model, dimension) keyed by prompt.
using ScoreGroups = std::map<PromptId, std::vector<double>>;

// M = (1/n) sum_i mean(a_i). Throws kValidation when there are no groups or
// a group is empty.
double MosMean(const ScoreGroups& groups);

// var(M) = (1/n^2) sum_i s_i^2 / k_i with s_i^2 the unbiased sample
// variance of prompt i. Throws kValidation naming the first prompt with
// fewer than two scores.
double MosVariance(const ScoreGroups& groups);

// "Overall" or a scenario name.
struct MosScope {
  std::optional<Scenario> scenario;
  std::string Name() const;
};
// Throws kNotFound for an unknown scope name.
MosScope ParseMosScope(std::string_view name);
std::vector<MosScope> AllMosScopes();  // Overall then the five scenarios

// Groups the scores of `model` on `dimension`, restricted to prompts of
// the scope's scenario. Records whose image is unknown are counted in
// `skipped` when given.
ScoreGroups GroupScores(std::span<const MosRecord> records, const ImageStore& images,
                        const Benchmark& benchmark, const ModelId& model, Dimension dimension,
                        const MosScope& scope, int64_t* skipped = nullptr);

struct MosSummary {
  ModelId model_id;
  Dimension dimension = Dimension::kPromptFollowing;
  std::string scope = "Overall";
  double mean = 0.0;
  std::optional<double> variance;  // absent when some prompt has k < 2
  int n_prompts = 0;
  double k_per_prompt = 0.0;  // average scores per prompt

  std::optional<double> ci_low() const;
  std::optional<double> ci_high() const;
};

// Throws kValidation when the scope holds no scores for `model`.
MosSummary Summarize(std::span<const MosRecord> records, const ImageStore& images,
                     const Benchmark& benchmark, const ModelId& model, Dimension dimension,
                     const MosScope& scope);

struct ComparisonVerdict {
  double delta = 0.0;  // mean_a - mean_b
  bool exceeds_threshold = false;
  double z = 0.0;
  double p_value = 1.0;
  bool significant = false;  // p < 0.01
};

// Throws kInvalidArgument when dimension or scope differ, or a variance is
// missing.
ComparisonVerdict CompareModels(const MosSummary& a, const MosSummary& b,
                                double quick_threshold = 0.1, double alpha = 0.01);

using CorrelationMatrix = std::array<std::array<std::optional<double>, 3>, 3>;

// Pearson correlations between the three dimensions over one assessor's
// records. Pairs involving a constant dimension are absent; the diagonal is
// 1. Throws kInvalidArgument with fewer than 3 records.
CorrelationMatrix InterdimCorrelation(std::span<const MosRecord> records);

Json CorrelationJson(const EvaluatorId& evaluator, const CorrelationMatrix& matrix,
                     size_t n_records);

struct TestPointResult {
  ImageId image_id;
  Capability capability = Capability::kQuantity;
  bool passed = false;
};

TestPointResult TestPointResultFromJson(const Json& j);
Json ToJson(const TestPointResult& r);

// Pass fraction per (model, capability); combinations without results are
// absent. Results for unknown images are skipped.
std::map<ModelId, std::map<Capability, double>> TestPointScores(
    std::span<const TestPointResult> results, const ImageStore& images);

Json TestPointScoresJson(const std::map<ModelId, std::map<Capability, double>>& scores);

// Report shaped as dimension -> scope -> model -> summary, with a 95%
// interval M +/- 1.96 sqrt(var). Cells without data are null.
Json MosReport(std::span<const MosRecord> records, const ImageStore& images,
               const Benchmark& benchmark, std::span<const ModelId> models);

}  // namespace arena

#endif  // ARENA_MOS_H_
