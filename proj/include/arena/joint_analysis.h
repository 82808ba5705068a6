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

// Joint analysis: how standardized MOS dimensions drive match outcomes.
//
// Each match is oriented so that A is the model with the lexicographically
// smaller id. With z_A and z_B the standardized MOS triples of the two
// shown images, the nine features are
//
//   dz_j            = z_A,j - z_B,j                       (j = PF, SA, AQ)
//   dzz_j_l         = z_A,j z_A,l - z_B,j z_B,l           (j < l)
//   level_j         = (z_A,j + z_B,j) / 2 * dz_j
//
// All are antisymmetric in (A, B), so the model has no intercept.

#ifndef ARENA_JOINT_ANALYSIS_H_
#define ARENA_JOINT_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "arena/benchmark.h"
#include "arena/json_io.h"
#include "arena/logistic.h"
#include "arena/rating.h"
#include "arena/types.h"

namespace arena {

inline constexpr int kNumJointFeatures = 9;
using MosTriple = std::array<double, 3>;
using JointFeatures = std::array<double, kNumJointFeatures>;

const std::vector<std::string>& JointFeatureNames();

// Per-image MOS: mean over evaluators of each image, with the mean over
// the (model, prompt) images as fallback.
class MosLookup {
 public:
  MosLookup() = default;
  MosLookup(std::span<const MosRecord> records, const ImageStore& images);
  // Per-image triples given directly; no fallback level.
  explicit MosLookup(std::map<ImageId, MosTriple> per_image)
      : per_image_(std::move(per_image)) {}

  // nullopt when neither the image nor its (model, prompt) has scores.
  std::optional<MosTriple> Find(const ImageId& image, const ModelId& model,
                                const PromptId& prompt) const;
  const std::map<ImageId, MosTriple>& per_image() const { return per_image_; }

 private:
  std::map<ImageId, MosTriple> per_image_;
  std::map<std::pair<ModelId, PromptId>, MosTriple> per_pair_;
};

struct Standardization {
  MosTriple mean{};
  MosTriple sd{};  // unbiased sample sd over images

  MosTriple Apply(const MosTriple& raw) const;
};

// Over the per-image means of `lookup`. Throws kValidation when a
// dimension has zero spread or fewer than two images are scored.
Standardization ComputeStandardization(const MosLookup& lookup);

JointFeatures ComputeJointFeatures(const MosTriple& z_a, const MosTriple& z_b);

struct RegressionDataset {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  Standardization standardization;
  int64_t n_matches = 0;  // matches that produced rows
  int64_t skipped = 0;    // matches lacking MOS for an image
};

// One row per decisive match and two half-weight rows (outcomes 1 and 0)
// per tie. Matches rejected by `filter` are ignored.
RegressionDataset BuildDesignMatrix(std::span<const MatchRecord> matches,
                                    const MosLookup& lookup, const Standardization& standard,
                                    const MatchFilter& filter = ExcludeAnchors());

// Win-rate gain in percentage points from a one-SD increase at the origin:
// 100 * (sigmoid(beta) - 0.5).
double WinrateIncrement(double beta);

struct WeightReport {
  std::string scope;
  int64_t n_rows = 0;
  int64_t n_matches = 0;
  int64_t skipped = 0;
  MosTriple increments{};  // percentage points, by Dimension
  LogisticFit fit;
};

WeightReport FitWeights(const RegressionDataset& data, const std::string& scope,
                        const LogisticOptions& options = {});

enum class Strata { kNone, kPersona, kScenario };

struct StratifiedOptions {
  Strata strata = Strata::kNone;
  int64_t min_rows = 500;
  LogisticOptions logistic;
};

// Independent fit per stratum in enum order; strata below min_rows are
// omitted with a warning. Standardization is global over all images.
// `personas` maps evaluators to personas (unknown evaluators are skipped
// for persona strata); `benchmark` resolves scenarios.
std::vector<WeightReport> StratifiedReport(std::span<const MatchRecord> matches,
                                           const MosLookup& lookup,
                                           const StratifiedOptions& options,
                                           const std::map<EvaluatorId, Persona>& personas = {},
                                           const Benchmark* benchmark = nullptr);

Json ToJson(const WeightReport& report);
Json WeightReportsJson(const std::vector<WeightReport>& reports);

}  // namespace arena

#endif  // ARENA_JOINT_ANALYSIS_H_
