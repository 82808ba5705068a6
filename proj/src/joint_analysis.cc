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

#include "arena/joint_analysis.h"

#include <cmath>

#include "arena/error.h"
#include "arena/stats.h"
#include "spdlog/spdlog.h"

namespace arena {

const std::vector<std::string>& JointFeatureNames() {
  static const std::vector<std::string> names = {
      "dz_prompt_following",
      "dz_structural_accuracy",
      "dz_aesthetic_quality",
      "dzz_prompt_following_structural_accuracy",
      "dzz_prompt_following_aesthetic_quality",
      "dzz_structural_accuracy_aesthetic_quality",
      "level_prompt_following",
      "level_structural_accuracy",
      "level_aesthetic_quality",
  };
  return names;
}

namespace {

struct Accumulator {
  MosTriple sum{};
  int64_t n = 0;

  void Add(const MosRecord& r) {
    for (int d = 0; d < 3; ++d) sum[d] += r.scores[d];
    ++n;
  }
  MosTriple Mean() const {
    MosTriple m;
    for (int d = 0; d < 3; ++d) m[d] = sum[d] / static_cast<double>(n);
    return m;
  }
};

}  // namespace

MosLookup::MosLookup(std::span<const MosRecord> records, const ImageStore& images) {
  std::map<ImageId, Accumulator> by_image;
  std::map<std::pair<ModelId, PromptId>, Accumulator> by_pair;
  for (const MosRecord& r : records) {
    by_image[r.image_id].Add(r);
    if (const GeneratedImage* g = images.Find(r.image_id)) {
      by_pair[{g->model_id, g->prompt_id}].Add(r);
    }
  }
  for (const auto& [id, acc] : by_image) per_image_[id] = acc.Mean();
  for (const auto& [key, acc] : by_pair) per_pair_[key] = acc.Mean();
}

std::optional<MosTriple> MosLookup::Find(const ImageId& image, const ModelId& model,
                                         const PromptId& prompt) const {
  if (auto it = per_image_.find(image); it != per_image_.end()) return it->second;
  if (auto it = per_pair_.find({model, prompt}); it != per_pair_.end()) return it->second;
  return std::nullopt;
}

MosTriple Standardization::Apply(const MosTriple& raw) const {
  MosTriple z;
  for (int d = 0; d < 3; ++d) z[d] = (raw[d] - mean[d]) / sd[d];
  return z;
}

Standardization ComputeStandardization(const MosLookup& lookup) {
  if (lookup.per_image().size() < 2) {
    throw Error(ErrorCode::kValidation, "standardization needs at least two scored images");
  }
  Standardization s;
  for (int d = 0; d < 3; ++d) {
    std::vector<double> v;
    v.reserve(lookup.per_image().size());
    for (const auto& [id, triple] : lookup.per_image()) v.push_back(triple[d]);
    s.mean[d] = Mean(v);
    s.sd[d] = std::sqrt(SampleVariance(v));
    if (!(s.sd[d] > 0.0)) {
      throw Error(ErrorCode::kValidation, "MOS dimension " +
                                              std::string(DimensionName(kAllDimensions[d])) +
                                              " has zero spread; cannot standardize");
    }
  }
  return s;
}

JointFeatures ComputeJointFeatures(const MosTriple& a, const MosTriple& b) {
  JointFeatures f;
  for (int j = 0; j < 3; ++j) f[j] = a[j] - b[j];
  f[3] = a[0] * a[1] - b[0] * b[1];
  f[4] = a[0] * a[2] - b[0] * b[2];
  f[5] = a[1] * a[2] - b[1] * b[2];
  for (int j = 0; j < 3; ++j) f[6 + j] = 0.5 * (a[j] + b[j]) * f[j];
  return f;
}

RegressionDataset BuildDesignMatrix(std::span<const MatchRecord> matches,
                                    const MosLookup& lookup, const Standardization& standard,
                                    const MatchFilter& filter) {
  RegressionDataset data;
  data.feature_names = JointFeatureNames();
  data.standardization = standard;
  std::vector<JointFeatures> rows;
  std::vector<double> ys, ws;
  for (const MatchRecord& m : matches) {
    if (filter && !filter(m)) continue;
    const auto left = lookup.Find(m.image_left, m.model_left, m.prompt_id);
    const auto right = lookup.Find(m.image_right, m.model_right, m.prompt_id);
    if (!left || !right) {
      ++data.skipped;
      continue;
    }
    const bool left_is_a = m.model_left < m.model_right;
    const MosTriple za = standard.Apply(left_is_a ? *left : *right);
    const MosTriple zb = standard.Apply(left_is_a ? *right : *left);
    const JointFeatures f = ComputeJointFeatures(za, zb);
    ++data.n_matches;
    if (IsTie(m.outcome)) {
      rows.push_back(f);
      ys.push_back(1.0);
      ws.push_back(0.5);
      rows.push_back(f);
      ys.push_back(0.0);
      ws.push_back(0.5);
    } else {
      const bool left_won = m.outcome == Outcome::kLeftWins;
      rows.push_back(f);
      ys.push_back(left_won == left_is_a ? 1.0 : 0.0);
      ws.push_back(1.0);
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  data.x.resize(n, kNumJointFeatures);
  data.y.resize(n);
  data.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < kNumJointFeatures; ++k) data.x(i, k) = rows[i][k];
    data.y(i) = ys[i];
    data.w(i) = ws[i];
  }
  if (data.skipped > 0) {
    spdlog::warn("design matrix: skipped {} matches without MOS", data.skipped);
  }
  return data;
}

double WinrateIncrement(double beta) { return 100.0 * (Sigmoid(beta) - 0.5); }

WeightReport FitWeights(const RegressionDataset& data, const std::string& scope,
                        const LogisticOptions& options) {
  WeightReport r;
  r.scope = scope;
  r.n_rows = data.x.rows();
  r.n_matches = data.n_matches;
  r.skipped = data.skipped;
  r.fit = FitLogistic(data.x, data.y, data.w, data.feature_names, options);
  for (int d = 0; d < 3; ++d) r.increments[d] = WinrateIncrement(r.fit.beta(d));
  return r;
}

std::vector<WeightReport> StratifiedReport(std::span<const MatchRecord> matches,
                                           const MosLookup& lookup,
                                           const StratifiedOptions& options,
                                           const std::map<EvaluatorId, Persona>& personas,
                                           const Benchmark* benchmark) {
  const Standardization standard = ComputeStandardization(lookup);
  std::vector<std::pair<std::string, MatchFilter>> strata;
  switch (options.strata) {
    case Strata::kNone:
      strata.push_back({"all", ExcludeAnchors()});
      break;
    case Strata::kPersona:
      for (Persona p : {Persona::kGeneralUser, Persona::kExpert, Persona::kDesigner,
                        Persona::kOther}) {
        strata.push_back({std::string(PersonaName(p)),
                          AllOf({ExcludeAnchors(), [&personas, p](const MatchRecord& m) {
                                   auto it = personas.find(m.evaluator_id);
                                   return it != personas.end() && it->second == p;
                                 }})});
      }
      break;
    case Strata::kScenario:
      if (!benchmark) {
        throw Error(ErrorCode::kInvalidArgument, "scenario strata need a benchmark");
      }
      for (Scenario s : kAllScenarios) {
        strata.push_back({std::string(ScenarioName(s)),
                          AllOf({ExcludeAnchors(), InScenario(*benchmark, s)})});
      }
      break;
  }
  std::vector<WeightReport> out;
  for (const auto& [name, filter] : strata) {
    const RegressionDataset data = BuildDesignMatrix(matches, lookup, standard, filter);
    if (data.x.rows() < options.min_rows) {
      if (data.x.rows() > 0 || options.strata == Strata::kNone) {
        spdlog::warn("stratum {} has {} rows (< {}); omitted", name, data.x.rows(),
                     options.min_rows);
      }
      continue;
    }
    out.push_back(FitWeights(data, name, options.logistic));
  }
  return out;
}

Json ToJson(const WeightReport& report) {
  Json j;
  j["scope"] = report.scope;
  Json inc;
  for (int d = 0; d < 3; ++d) inc[std::string(DimensionName(kAllDimensions[d]))] =
      report.increments[d];
  j["increments"] = inc;
  Json coef;
  for (size_t k = 0; k < report.fit.feature_names.size(); ++k) {
    const double se = report.fit.std_errors(static_cast<Eigen::Index>(k));
    coef[report.fit.feature_names[k]] = {
        {"beta", report.fit.beta(static_cast<Eigen::Index>(k))},
        {"std_error", std::isfinite(se) ? Json(se) : Json(nullptr)}};
  }
  j["coefficients"] = coef;
  j["n_rows"] = report.n_rows;
  j["n_matches"] = report.n_matches;
  j["n_skipped"] = report.skipped;
  j["converged"] = report.fit.converged;
  return j;
}

Json WeightReportsJson(const std::vector<WeightReport>& reports) {
  Json out = Json::array();
  for (const WeightReport& r : reports) out.push_back(ToJson(r));
  return out;
}

}  // namespace arena
