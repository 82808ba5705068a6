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

// Evaluator quality control: behavioral flags, anchor checks, expert
// qualification and audit sampling.

#ifndef ARENA_QUALITY_CONTROL_H_
#define ARENA_QUALITY_CONTROL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "arena/json_io.h"
#include "arena/types.h"

namespace arena {

inline constexpr char kFlagSpeed[] = "speed_anomaly";
inline constexpr char kFlagRepetition[] = "repetition";
inline constexpr char kFlagAnchor[] = "anchor_failure";

struct TemporalOptions {
  double z_threshold = 3.0;
  int run_threshold = 30;
  int min_votes = 5;
  double sd_floor_s = 0.5;
};

// Location and scale of typical evaluator mean durations.
struct DurationReference {
  double mean_s = 0.0;
  double sd_s = 1.0;
};

// (mean - duration) / max(sd, sd_floor); positive means faster than usual.
double SpeedZ(double duration_s, double mean_s, double sd_s, double sd_floor_s = 0.5);

// Longest run of identical consecutive outcomes.
int LongestRun(std::span<const MatchRecord> votes);

// Flags for one evaluator's votes, taken in the given order. Fewer than
// min_votes votes yields no flags.
//
// Without a reference, speed_anomaly fires when any single vote is more
// than z_threshold of the evaluator's own standard deviations faster than
// the evaluator's own mean. With a reference, it fires when the
// evaluator's mean duration is more than z_threshold reference standard
// deviations below the reference mean; this catches evaluators who are
// uniformly fast and does not grow more trigger-happy with vote count.
std::set<std::string> DetectTemporalAnomalies(
    std::span<const MatchRecord> votes, const TemporalOptions& options = {},
    const std::optional<DurationReference>& reference = std::nullopt);

// Median and scaled median absolute deviation of per-evaluator mean
// durations. Throws kInvalidArgument when `evaluator_means` is empty.
DurationReference RobustDurationReference(std::vector<double> evaluator_means);

// True (flag) iff anchor_seen >= min_anchors and the failure rate exceeds
// fail_rate_threshold.
bool AnchorFailureAssess(const EvaluatorProfile& profile, int min_anchors = 10,
                         double fail_rate_threshold = 0.3);

// Throws kInvalidArgument on a length mismatch or empty input.
double CohenKappa(std::span<const std::string> a, std::span<const std::string> b);
double CohenKappa(std::span<const Outcome> a, std::span<const Outcome> b);

struct QualificationResult {
  bool passed = false;
  double agreement = 0.0;
  double kappa = 0.0;
  int n_items = 0;
};

QualificationResult QualifyExpert(std::span<const Outcome> candidate,
                                  std::span<const Outcome> consensus,
                                  double agreement_min = 0.85, double kappa_min = 0.8);

// Number of records an audit of `fraction` draws: ceil(fraction * n).
size_t AuditSize(size_t n, double fraction);

// Uniform sample without replacement of AuditSize(n, fraction) records,
// returned in input order.
template <typename T>
std::vector<T> SampleForAudit(std::span<const T> records, double fraction, uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "audit fraction must be in [0, 1]");
  }
  std::vector<T> out;
  std::mt19937_64 rng(seed);
  std::sample(records.begin(), records.end(), std::back_inserter(out),
              AuditSize(records.size(), fraction), rng);
  return out;
}

// Drops matches cast by flagged evaluators.
std::vector<MatchRecord> ApplyFlags(std::span<const MatchRecord> matches,
                                    std::span<const EvaluatorProfile> profiles);

// True when the vote on an anchor match picked the verified better image.
// Ties count as failures.
bool AnchorVoteCorrect(const MatchRecord& vote, const AnchorPair& anchor);

// Index of anchors by their (unordered) image pair.
class AnchorIndex {
 public:
  AnchorIndex() = default;
  explicit AnchorIndex(std::span<const AnchorPair> anchors);
  const AnchorPair* Find(const ImageId& a, const ImageId& b) const;

 private:
  std::vector<AnchorPair> anchors_;
  std::map<std::pair<ImageId, ImageId>, size_t> by_images_;
};

struct QcOptions {
  TemporalOptions temporal;
  int min_anchors = 10;
  double anchor_fail_threshold = 0.3;
  // Compare evaluator mean durations to a robust population reference
  // instead of testing single votes against the evaluator's own spread.
  bool population_reference = true;
};

QcOptions QcOptionsFromJson(const Json& j);

struct QcEvaluatorReport {
  EvaluatorId evaluator_id;
  std::set<std::string> flags;
  int64_t n_votes = 0;
  double mean_duration_s = 0.0;
  double stddev_duration_s = 0.0;
  // Largest single-vote z against own statistics, or the evaluator-level z
  // against the population reference.
  double speed_z = 0.0;
  int longest_run = 0;
  int64_t anchor_seen = 0;
  int64_t anchor_failed = 0;
};

struct QcReport {
  std::vector<QcEvaluatorReport> evaluators;  // by evaluator_id
  std::vector<EvaluatorProfile> profiles;     // updated, same order
  std::optional<DurationReference> reference;
  int64_t unknown_anchor_votes = 0;
};

// Rebuilds duration statistics and anchor counters from the match log and
// flags evaluators. `known` supplies mode, persona and qualification for
// evaluators (others default to public general users); its behavioral
// fields are recomputed.
QcReport RunQc(std::span<const MatchRecord> matches, std::span<const AnchorPair> anchors,
               std::span<const EvaluatorProfile> known = {}, const QcOptions& options = {});

Json ToJson(const QcEvaluatorReport& report);
Json ToJson(const QcReport& report);

}  // namespace arena

#endif  // ARENA_QUALITY_CONTROL_H_
