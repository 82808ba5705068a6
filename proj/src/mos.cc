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

#include "arena/mos.h"

#include <cmath>
#include <limits>

#include "arena/error.h"
#include "arena/stats.h"

namespace arena {

double MosMean(const ScoreGroups& groups) {
  if (groups.empty()) throw Error(ErrorCode::kValidation, "no MOS records");
  double sum = 0.0;
  for (const auto& [prompt, scores] : groups) {
    if (scores.empty()) {
      throw Error(ErrorCode::kValidation, "prompt " + prompt + " has no scores");
    }
    double s = 0.0;
    for (double x : scores) s += x;
    sum += s / static_cast<double>(scores.size());
  }
  return sum / static_cast<double>(groups.size());
}

double MosVariance(const ScoreGroups& groups) {
  if (groups.empty()) throw Error(ErrorCode::kValidation, "no MOS records");
  double sum = 0.0;
  for (const auto& [prompt, scores] : groups) {
    if (scores.size() < 2) {
      throw Error(ErrorCode::kValidation,
                  "prompt " + prompt + " has fewer than 2 scores; variance undefined");
    }
    sum += SampleVariance(scores) / static_cast<double>(scores.size());
  }
  const double n = static_cast<double>(groups.size());
  return sum / (n * n);
}

std::string MosScope::Name() const {
  return scenario ? std::string(ScenarioName(*scenario)) : std::string("Overall");
}

MosScope ParseMosScope(std::string_view name) {
  if (name == "Overall" || name.empty()) return {};
  if (auto s = ParseScenario(name)) return {*s};
  throw Error(ErrorCode::kNotFound, "unknown scope: " + std::string(name));
}

std::vector<MosScope> AllMosScopes() {
  std::vector<MosScope> out = {MosScope{}};
  for (Scenario s : kAllScenarios) out.push_back({s});
  return out;
}

ScoreGroups GroupScores(std::span<const MosRecord> records, const ImageStore& images,
                        const Benchmark& benchmark, const ModelId& model, Dimension dimension,
                        const MosScope& scope, int64_t* skipped) {
  ScoreGroups groups;
  for (const MosRecord& r : records) {
    const GeneratedImage* image = images.Find(r.image_id);
    if (!image) {
      if (skipped) ++*skipped;
      continue;
    }
    if (image->model_id != model) continue;
    if (scope.scenario) {
      const PromptItem* p = benchmark.Find(image->prompt_id);
      if (!p || p->scenario_label != *scope.scenario) continue;
    }
    groups[image->prompt_id].push_back(r.score(dimension));
  }
  return groups;
}

std::optional<double> MosSummary::ci_low() const {
  if (!variance) return std::nullopt;
  return mean - 1.96 * std::sqrt(*variance);
}

std::optional<double> MosSummary::ci_high() const {
  if (!variance) return std::nullopt;
  return mean + 1.96 * std::sqrt(*variance);
}

MosSummary Summarize(std::span<const MosRecord> records, const ImageStore& images,
                     const Benchmark& benchmark, const ModelId& model, Dimension dimension,
                     const MosScope& scope) {
  const ScoreGroups groups = GroupScores(records, images, benchmark, model, dimension, scope);
  if (groups.empty()) {
    throw Error(ErrorCode::kValidation,
                "no MOS records for model " + model + " in scope " + scope.Name());
  }
  MosSummary s;
  s.model_id = model;
  s.dimension = dimension;
  s.scope = scope.Name();
  s.mean = MosMean(groups);
  s.n_prompts = static_cast<int>(groups.size());
  size_t total = 0;
  bool all_pairs = true;
  for (const auto& [prompt, scores] : groups) {
    total += scores.size();
    all_pairs = all_pairs && scores.size() >= 2;
  }
  s.k_per_prompt = static_cast<double>(total) / static_cast<double>(groups.size());
  if (all_pairs) s.variance = MosVariance(groups);
  return s;
}

ComparisonVerdict CompareModels(const MosSummary& a, const MosSummary& b,
                                double quick_threshold, double alpha) {
  if (a.dimension != b.dimension || a.scope != b.scope) {
    throw Error(ErrorCode::kInvalidArgument, "cannot compare summaries of different "
                                             "dimension or scope");
  }
  if (!a.variance || !b.variance) {
    throw Error(ErrorCode::kInvalidArgument, "comparison needs both variances");
  }
  ComparisonVerdict v;
  v.delta = a.mean - b.mean;
  const double abs_delta = std::abs(v.delta);
  v.exceeds_threshold = abs_delta > quick_threshold;
  const double se = std::sqrt(*a.variance + *b.variance);
  if (se > 0.0) {
    v.z = abs_delta / se;
  } else {
    v.z = abs_delta > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  v.p_value = TwoSidedNormalP(v.z);
  v.significant = v.p_value < alpha;
  return v;
}

CorrelationMatrix InterdimCorrelation(std::span<const MosRecord> records) {
  if (records.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "correlation needs at least 3 records");
  }
  std::array<std::vector<double>, 3> cols;
  for (const MosRecord& r : records) {
    for (int d = 0; d < 3; ++d) cols[d].push_back(r.scores[d]);
  }
  CorrelationMatrix m;
  for (int i = 0; i < 3; ++i) {
    m[i][i] = 1.0;
    for (int j = i + 1; j < 3; ++j) {
      m[i][j] = m[j][i] = Pearson(cols[i], cols[j]);
    }
  }
  return m;
}

Json CorrelationJson(const EvaluatorId& evaluator, const CorrelationMatrix& matrix,
                     size_t n_records) {
  Json j;
  j["evaluator_id"] = evaluator;
  j["n_records"] = n_records;
  Json pairs;
  for (int i = 0; i < 3; ++i) {
    for (int k = i + 1; k < 3; ++k) {
      const std::string key = std::string(DimensionName(kAllDimensions[i])) + "/" +
                              std::string(DimensionName(kAllDimensions[k]));
      pairs[key] = matrix[i][k] ? Json(*matrix[i][k]) : Json(nullptr);
    }
  }
  j["pairs"] = pairs;
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) {
    Json row = Json::array();
    for (int k = 0; k < 3; ++k) row.push_back(matrix[i][k] ? Json(*matrix[i][k]) : Json(nullptr));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  return j;
}

TestPointResult TestPointResultFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "test point result must be an object");
  TestPointResult r;
  try {
    r.image_id = j.at("image_id").get<std::string>();
    const std::string cap = j.at("capability").get<std::string>();
    auto c = ParseCapability(cap);
    if (!c) throw Error(ErrorCode::kValidation, "unknown capability: " + cap);
    r.capability = *c;
    const Json& passed = j.at("passed");
    if (passed.is_boolean()) {
      r.passed = passed.get<bool>();
    } else {
      const int v = passed.get<int>();
      if (v != 0 && v != 1) throw Error(ErrorCode::kValidation, "passed must be 0 or 1");
      r.passed = v == 1;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("test point result: ") + e.what());
  }
  return r;
}

Json ToJson(const TestPointResult& r) {
  Json j;
  j["image_id"] = r.image_id;
  j["capability"] = CapabilityName(r.capability);
  j["passed"] = r.passed ? 1 : 0;
  return j;
}

std::map<ModelId, std::map<Capability, double>> TestPointScores(
    std::span<const TestPointResult> results, const ImageStore& images) {
  std::map<ModelId, std::map<Capability, std::pair<int64_t, int64_t>>> counts;
  for (const TestPointResult& r : results) {
    const GeneratedImage* image = images.Find(r.image_id);
    if (!image) continue;
    auto& [passed, total] = counts[image->model_id][r.capability];
    passed += r.passed;
    ++total;
  }
  std::map<ModelId, std::map<Capability, double>> out;
  for (const auto& [model, caps] : counts) {
    for (const auto& [cap, pt] : caps) {
      out[model][cap] = static_cast<double>(pt.first) / static_cast<double>(pt.second);
    }
  }
  return out;
}

Json TestPointScoresJson(const std::map<ModelId, std::map<Capability, double>>& scores) {
  Json j = Json::object();
  for (const auto& [model, caps] : scores) {
    Json row = Json::object();
    for (const auto& [cap, value] : caps) row[std::string(CapabilityName(cap))] = value;
    j[model] = row;
  }
  return j;
}

Json MosReport(std::span<const MosRecord> records, const ImageStore& images,
               const Benchmark& benchmark, std::span<const ModelId> models) {
  Json report;
  report["models"] = Json::array();
  for (const ModelId& m : models) report["models"].push_back(m);
  report["scopes"] = Json::array();
  for (const MosScope& s : AllMosScopes()) report["scopes"].push_back(s.Name());
  Json dims;
  for (Dimension d : kAllDimensions) {
    Json by_scope;
    for (const MosScope& scope : AllMosScopes()) {
      Json by_model;
      for (const ModelId& m : models) {
        const ScoreGroups groups = GroupScores(records, images, benchmark, m, d, scope);
        if (groups.empty()) {
          by_model[m] = nullptr;
          continue;
        }
        const MosSummary s = Summarize(records, images, benchmark, m, d, scope);
        Json cell;
        cell["mean"] = s.mean;
        cell["variance"] = s.variance ? Json(*s.variance) : Json(nullptr);
        cell["ci_low"] = s.ci_low() ? Json(*s.ci_low()) : Json(nullptr);
        cell["ci_high"] = s.ci_high() ? Json(*s.ci_high()) : Json(nullptr);
        cell["n_prompts"] = s.n_prompts;
        cell["k_per_prompt"] = s.k_per_prompt;
        by_model[m] = cell;
      }
      by_scope[scope.Name()] = by_model;
    }
    dims[std::string(DimensionName(d))] = by_scope;
  }
  report["dimensions"] = dims;
  return report;
}

}  // namespace arena
