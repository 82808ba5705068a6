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

#include "arena/types.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "arena/error.h"

namespace arena {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConnectivity: return "connectivity";
    case ErrorCode::kNonConvergence: return "non_convergence";
    case ErrorCode::kUndefined: return "undefined";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

namespace {

template <typename Enum, size_t N>
std::optional<Enum> Lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename Enum, size_t N>
std::string_view NameOf(const std::array<std::pair<Enum, std::string_view>, N>& table,
                        Enum e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<Outcome, std::string_view>, 4> kOutcomes = {{
    {Outcome::kLeftWins, "left_wins"},
    {Outcome::kRightWins, "right_wins"},
    {Outcome::kBothGood, "both_good"},
    {Outcome::kBothBad, "both_bad"},
}};

constexpr std::array<std::pair<Mode, std::string_view>, 2> kModes = {{
    {Mode::kExpert, "expert"},
    {Mode::kPublic, "public"},
}};

constexpr std::array<std::pair<Persona, std::string_view>, 4> kPersonas = {{
    {Persona::kGeneralUser, "general_user"},
    {Persona::kExpert, "expert"},
    {Persona::kDesigner, "designer"},
    {Persona::kOther, "other"},
}};

constexpr std::array<std::pair<Scenario, std::string_view>, 5> kScenarios = {{
    {Scenario::kFilm, "Film"},
    {Scenario::kArt, "Art"},
    {Scenario::kEntertainment, "Entertainment"},
    {Scenario::kAestheticDesign, "AestheticDesign"},
    {Scenario::kFunctionalDesign, "FunctionalDesign"},
}};

constexpr std::array<std::pair<Capability, std::string_view>, kNumCapabilities>
    kCapabilities = {{
        {Capability::kQuantity, "Quantity"},
        {Capability::kAttribute, "Attribute"},
        {Capability::kRelation, "Relation"},
        {Capability::kActionState, "Action/State"},
        {Capability::kStyle, "Style"},
        {Capability::kAesthetic, "Aesthetic"},
        {Capability::kAtmosphere, "Atmosphere"},
        {Capability::kMultiEntityFeatureMatching, "Multi-Entity Feature Matching"},
        {Capability::kLayoutTypography, "Layout & Typography"},
        {Capability::kAntiRealism, "Anti-Realism"},
        {Capability::kNegation, "Negation"},
        {Capability::kPronounReference, "Pronoun Reference"},
        {Capability::kConsistency, "Consistency"},
    }};

constexpr std::array<std::pair<Dimension, std::string_view>, 3> kDimensions = {{
    {Dimension::kPromptFollowing, "prompt_following"},
    {Dimension::kStructuralAccuracy, "structural_accuracy"},
    {Dimension::kAestheticQuality, "aesthetic_quality"},
}};

bool ParseInt(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view OutcomeName(Outcome o) { return NameOf(kOutcomes, o); }
std::string_view ModeName(Mode m) { return NameOf(kModes, m); }
std::string_view PersonaName(Persona p) { return NameOf(kPersonas, p); }
std::string_view ScenarioName(Scenario s) { return NameOf(kScenarios, s); }
std::string_view CapabilityName(Capability c) { return NameOf(kCapabilities, c); }
std::string_view DimensionName(Dimension d) { return NameOf(kDimensions, d); }

std::optional<Outcome> ParseOutcome(std::string_view s) { return Lookup(kOutcomes, s); }
std::optional<Mode> ParseMode(std::string_view s) { return Lookup(kModes, s); }
std::optional<Persona> ParsePersona(std::string_view s) { return Lookup(kPersonas, s); }
std::optional<Scenario> ParseScenario(std::string_view s) {
  return Lookup(kScenarios, s);
}
std::optional<Capability> ParseCapability(std::string_view s) {
  return Lookup(kCapabilities, s);
}
std::optional<Dimension> ParseDimension(std::string_view s) {
  return Lookup(kDimensions, s);
}

std::string FormatTimestamp(Timestamp t) {
  using namespace std::chrono;
  const sys_days day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> tod{t - day};
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                static_cast<int>(tod.subseconds().count()));
  return buf;
}

std::optional<Timestamp> ParseTimestamp(std::string_view text) {
  using namespace std::chrono;
  if (text.size() < 20 || text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != 't') || text[13] != ':' ||
      text[16] != ':') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, s;
  if (!ParseInt(text.substr(0, 4), y) || !ParseInt(text.substr(5, 2), mo) ||
      !ParseInt(text.substr(8, 2), d) || !ParseInt(text.substr(11, 2), h) ||
      !ParseInt(text.substr(14, 2), mi) || !ParseInt(text.substr(17, 2), s)) {
    return std::nullopt;
  }
  if (h > 23 || mi > 59 || s > 60) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) millis = millis * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (; digits < 3; ++digits) millis *= 10;
  }
  if (pos >= text.size()) return std::nullopt;
  minutes offset{0};
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    if (pos + 6 != text.size() || text[pos + 3] != ':') return std::nullopt;
    int oh, om;
    if (!ParseInt(text.substr(pos + 1, 2), oh) ||
        !ParseInt(text.substr(pos + 4, 2), om)) {
      return std::nullopt;
    }
    offset = hours{oh} + minutes{om};
    if (text[pos] == '-') offset = -offset;
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  return Timestamp{sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} +
                   milliseconds{millis} - offset};
}

ModelId ValidateModelEntries(std::span<const ModelEntry> models) {
  std::set<ModelId> seen;
  std::optional<ModelId> baseline;
  for (const ModelEntry& m : models) {
    if (!seen.insert(m.model_id).second) {
      throw Error(ErrorCode::kValidation, "duplicate model_id: " + m.model_id);
    }
    if (m.is_baseline) {
      if (baseline) {
        throw Error(ErrorCode::kValidation,
                    "more than one baseline model: " + *baseline + ", " +
                        m.model_id);
      }
      baseline = m.model_id;
    }
  }
  if (!baseline) throw Error(ErrorCode::kValidation, "no baseline model");
  return *baseline;
}

void ValidateMatchRecord(const MatchRecord& m) {
  if (m.model_left == m.model_right) {
    throw Error(ErrorCode::kValidation,
                "match " + m.match_id + ": model_left == model_right");
  }
  if (!(m.duration_s > 0.0) || !std::isfinite(m.duration_s)) {
    throw Error(ErrorCode::kValidation,
                "match " + m.match_id + ": duration_s must be > 0");
  }
}

void ValidateMosRecord(const MosRecord& r) {
  for (Dimension d : kAllDimensions) {
    const int s = r.score(d);
    if (s < 1 || s > 5) {
      throw Error(ErrorCode::kValidation,
                  "mos record for " + r.image_id + ": " +
                      std::string(DimensionName(d)) + " score " +
                      std::to_string(s) + " outside 1..5");
    }
  }
}

double EvaluatorProfile::stddev_duration_s() const {
  if (n_votes < 2) return 0.0;
  return std::sqrt(std::max(0.0, m2_duration / static_cast<double>(n_votes - 1)));
}

void EvaluatorProfile::ObserveDuration(double seconds) {
  ++n_votes;
  const double delta = seconds - mean_duration_s;
  mean_duration_s += delta / static_cast<double>(n_votes);
  m2_duration += delta * (seconds - mean_duration_s);
}

ImageStore::ImageStore(std::vector<GeneratedImage> images)
    : images_(std::move(images)) {
  for (size_t i = 0; i < images_.size(); ++i) {
    const GeneratedImage& img = images_[i];
    if (!by_id_.emplace(img.image_id, i).second) {
      throw Error(ErrorCode::kValidation, "duplicate image_id: " + img.image_id);
    }
    if (img.sample_index < 1 || img.sample_index > 4) {
      throw Error(ErrorCode::kValidation,
                  "image " + img.image_id + ": sample_index outside 1..4");
    }
  }
  std::vector<size_t> order(images_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return images_[a].sample_index < images_[b].sample_index;
  });
  for (size_t i : order) {
    const GeneratedImage& img = images_[i];
    by_pair_[{img.model_id, img.prompt_id}].push_back(img.image_id);
  }
}

const GeneratedImage* ImageStore::Find(const ImageId& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &images_[it->second];
}

std::span<const ImageId> ImageStore::Samples(const ModelId& model,
                                             const PromptId& prompt) const {
  auto it = by_pair_.find({model, prompt});
  if (it == by_pair_.end()) return {};
  return it->second;
}

}  // namespace arena
