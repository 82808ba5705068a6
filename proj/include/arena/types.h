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

// Domain vocabulary shared by every module: label enums, match and MOS
// records, generated images and evaluator profiles.

#ifndef ARENA_TYPES_H_
#define ARENA_TYPES_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arena {

using ModelId = std::string;
using PromptId = std::string;
using ImageId = std::string;
using EvaluatorId = std::string;

// Millisecond-resolution UTC time point, serialized as RFC 3339.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

std::string FormatTimestamp(Timestamp t);
// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)".
std::optional<Timestamp> ParseTimestamp(std::string_view text);

enum class Outcome { kLeftWins, kRightWins, kBothGood, kBothBad };
enum class Mode { kExpert, kPublic };
enum class Persona { kGeneralUser, kExpert, kDesigner, kOther };

enum class Scenario {
  kFilm,
  kArt,
  kEntertainment,
  kAestheticDesign,
  kFunctionalDesign,
};
inline constexpr std::array<Scenario, 5> kAllScenarios = {
    Scenario::kFilm, Scenario::kArt, Scenario::kEntertainment,
    Scenario::kAestheticDesign, Scenario::kFunctionalDesign};

// Closed capability vocabulary. Adding a label is a schema version bump.
enum class Capability {
  kQuantity,
  kAttribute,
  kRelation,
  kActionState,
  kStyle,
  kAesthetic,
  kAtmosphere,
  kMultiEntityFeatureMatching,
  kLayoutTypography,
  kAntiRealism,
  kNegation,
  kPronounReference,
  kConsistency,
};
inline constexpr int kNumCapabilities = 13;

enum class Dimension { kPromptFollowing, kStructuralAccuracy, kAestheticQuality };
inline constexpr std::array<Dimension, 3> kAllDimensions = {
    Dimension::kPromptFollowing, Dimension::kStructuralAccuracy,
    Dimension::kAestheticQuality};

std::string_view OutcomeName(Outcome o);
std::string_view ModeName(Mode m);
std::string_view PersonaName(Persona p);
std::string_view ScenarioName(Scenario s);
std::string_view CapabilityName(Capability c);
std::string_view DimensionName(Dimension d);

std::optional<Outcome> ParseOutcome(std::string_view s);
std::optional<Mode> ParseMode(std::string_view s);
std::optional<Persona> ParsePersona(std::string_view s);
std::optional<Scenario> ParseScenario(std::string_view s);
std::optional<Capability> ParseCapability(std::string_view s);
std::optional<Dimension> ParseDimension(std::string_view s);

inline bool IsTie(Outcome o) {
  return o == Outcome::kBothGood || o == Outcome::kBothBad;
}

struct ModelEntry {
  ModelId model_id;
  std::string display_name;
  bool is_baseline = false;
};

// Throws kValidation unless ids are unique and exactly one entry is the
// baseline. Returns the baseline id.
ModelId ValidateModelEntries(std::span<const ModelEntry> models);

struct TestPointSpec {
  Capability capability;
  std::string requirement_text;

  bool operator==(const TestPointSpec&) const = default;
};

struct PromptItem {
  PromptId prompt_id;
  std::string text;
  std::set<Capability> capability_labels;
  Scenario scenario_label = Scenario::kFilm;
  std::vector<TestPointSpec> test_points;

  bool operator==(const PromptItem&) const = default;
};

struct GeneratedImage {
  ImageId image_id;
  ModelId model_id;
  PromptId prompt_id;
  int sample_index = 1;  // 1..4
  std::string uri;
};

struct MatchRecord {
  std::string match_id;
  ModelId model_left;
  ModelId model_right;
  PromptId prompt_id;
  ImageId image_left;
  ImageId image_right;
  Outcome outcome = Outcome::kBothGood;
  EvaluatorId evaluator_id;
  Timestamp submitted_at{};
  double duration_s = 1.0;
  bool is_anchor = false;
  Mode mode = Mode::kPublic;

  bool operator==(const MatchRecord&) const = default;
};

// Throws kValidation on model_left == model_right or duration_s <= 0.
void ValidateMatchRecord(const MatchRecord& m);

struct MosRecord {
  EvaluatorId evaluator_id;
  ImageId image_id;
  // Indexed by Dimension; each in 1..5.
  std::array<int, 3> scores{};
  Timestamp submitted_at{};

  int score(Dimension d) const { return scores[static_cast<int>(d)]; }
  bool operator==(const MosRecord&) const = default;
};

void ValidateMosRecord(const MosRecord& r);

// A pre-verified comparison; image_good is the better image.
struct AnchorPair {
  std::string anchor_id;
  PromptId prompt_id;
  ImageId image_good;
  ImageId image_bad;
};

struct EvaluatorProfile {
  EvaluatorId evaluator_id;
  Mode mode = Mode::kPublic;
  Persona persona = Persona::kGeneralUser;
  bool qualified = false;

  int64_t n_votes = 0;
  double mean_duration_s = 0.0;
  double m2_duration = 0.0;  // Welford accumulator
  int64_t anchor_seen = 0;
  int64_t anchor_failed = 0;
  bool flagged = false;
  std::set<std::string> flag_reasons;

  double stddev_duration_s() const;
  void ObserveDuration(double seconds);
  void Flag(const std::string& reason) {
    flagged = true;
    flag_reasons.insert(reason);
  }
};

// Read-only index over generated images.
class ImageStore {
 public:
  ImageStore() = default;
  explicit ImageStore(std::vector<GeneratedImage> images);

  const GeneratedImage* Find(const ImageId& id) const;
  // Images for (model, prompt) ordered by sample_index; empty if none.
  std::span<const ImageId> Samples(const ModelId& model,
                                   const PromptId& prompt) const;
  const std::vector<GeneratedImage>& images() const { return images_; }
  size_t size() const { return images_.size(); }

 private:
  std::vector<GeneratedImage> images_;
  std::map<ImageId, size_t> by_id_;
  std::map<std::pair<ModelId, PromptId>, std::vector<ImageId>> by_pair_;
};

}  // namespace arena

#endif  // ARENA_TYPES_H_
