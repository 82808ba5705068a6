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

#include "arena/json_io.h"

#include <fstream>
#include <sstream>

namespace arena {
namespace {

[[noreturn]] void SchemaError(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kSchema, "field '" + field + "': " + what);
}

const Json& Field(const Json& j, const char* name) {
  if (!j.is_object()) SchemaError(name, "record is not a JSON object");
  auto it = j.find(name);
  if (it == j.end()) SchemaError(name, "missing");
  return *it;
}

std::string StringField(const Json& j, const char* name) {
  const Json& v = Field(j, name);
  if (!v.is_string()) SchemaError(name, "expected string");
  return v.get<std::string>();
}

double NumberField(const Json& j, const char* name) {
  const Json& v = Field(j, name);
  if (!v.is_number()) SchemaError(name, "expected number");
  return v.get<double>();
}

int IntField(const Json& j, const char* name) {
  const Json& v = Field(j, name);
  if (!v.is_number_integer()) SchemaError(name, "expected integer");
  return v.get<int>();
}

bool BoolField(const Json& j, const char* name) {
  const Json& v = Field(j, name);
  if (!v.is_boolean()) SchemaError(name, "expected boolean");
  return v.get<bool>();
}

template <typename T>
T EnumField(const Json& j, const char* name,
            std::optional<T> (*parse)(std::string_view)) {
  const std::string s = StringField(j, name);
  std::optional<T> v = parse(s);
  if (!v) {
    throw Error(ErrorCode::kValidation,
                "field '" + std::string(name) + "': '" + s +
                    "' is outside the vocabulary");
  }
  return *v;
}

Timestamp TimeField(const Json& j, const char* name) {
  const std::string s = StringField(j, name);
  std::optional<Timestamp> t = ParseTimestamp(s);
  if (!t) SchemaError(name, "not an RFC 3339 timestamp: " + s);
  return *t;
}

}  // namespace

Json ToJson(const MatchRecord& m) {
  return Json{{"match_id", m.match_id},
              {"model_left", m.model_left},
              {"model_right", m.model_right},
              {"prompt_id", m.prompt_id},
              {"image_left", m.image_left},
              {"image_right", m.image_right},
              {"outcome", OutcomeName(m.outcome)},
              {"evaluator_id", m.evaluator_id},
              {"submitted_at", FormatTimestamp(m.submitted_at)},
              {"duration_s", m.duration_s},
              {"is_anchor", m.is_anchor},
              {"mode", ModeName(m.mode)}};
}

MatchRecord MatchFromJson(const Json& j) {
  MatchRecord m;
  m.match_id = StringField(j, "match_id");
  m.model_left = StringField(j, "model_left");
  m.model_right = StringField(j, "model_right");
  m.prompt_id = StringField(j, "prompt_id");
  m.image_left = StringField(j, "image_left");
  m.image_right = StringField(j, "image_right");
  m.outcome = EnumField(j, "outcome", &ParseOutcome);
  m.evaluator_id = StringField(j, "evaluator_id");
  m.submitted_at = TimeField(j, "submitted_at");
  m.duration_s = NumberField(j, "duration_s");
  m.is_anchor = BoolField(j, "is_anchor");
  m.mode = EnumField(j, "mode", &ParseMode);
  ValidateMatchRecord(m);
  return m;
}

Json ToJson(const PromptItem& p) {
  Json labels = Json::array();
  for (Capability c : p.capability_labels) labels.push_back(CapabilityName(c));
  Json points = Json::array();
  for (const TestPointSpec& tp : p.test_points) {
    points.push_back({{"capability", CapabilityName(tp.capability)},
                      {"requirement_text", tp.requirement_text}});
  }
  return Json{{"prompt_id", p.prompt_id},
              {"text", p.text},
              {"capability_labels", labels},
              {"scenario_label", ScenarioName(p.scenario_label)},
              {"test_points", points}};
}

PromptItem PromptFromJson(const Json& j) {
  PromptItem p;
  p.prompt_id = StringField(j, "prompt_id");
  p.text = StringField(j, "text");
  const Json& labels = Field(j, "capability_labels");
  if (!labels.is_array()) SchemaError("capability_labels", "expected array");
  for (const Json& l : labels) {
    if (!l.is_string()) SchemaError("capability_labels", "expected strings");
    std::optional<Capability> c = ParseCapability(l.get<std::string>());
    if (!c) {
      throw Error(ErrorCode::kValidation,
                  "field 'capability_labels': label '" + l.get<std::string>() +
                      "' is outside the vocabulary");
    }
    if (!p.capability_labels.insert(*c).second) {
      throw Error(ErrorCode::kValidation,
                  "field 'capability_labels': duplicate label '" +
                      l.get<std::string>() + "'");
    }
  }
  p.scenario_label = EnumField(j, "scenario_label", &ParseScenario);
  const Json& points = Field(j, "test_points");
  if (!points.is_array()) SchemaError("test_points", "expected array");
  for (const Json& tp : points) {
    TestPointSpec spec;
    spec.capability = EnumField(tp, "capability", &ParseCapability);
    spec.requirement_text = StringField(tp, "requirement_text");
    p.test_points.push_back(std::move(spec));
  }
  return p;
}

Json ToJson(const GeneratedImage& img) {
  return Json{{"image_id", img.image_id},
              {"model_id", img.model_id},
              {"prompt_id", img.prompt_id},
              {"sample_index", img.sample_index},
              {"uri", img.uri}};
}

GeneratedImage ImageFromJson(const Json& j) {
  GeneratedImage img;
  img.image_id = StringField(j, "image_id");
  img.model_id = StringField(j, "model_id");
  img.prompt_id = StringField(j, "prompt_id");
  img.sample_index = IntField(j, "sample_index");
  img.uri = StringField(j, "uri");
  return img;
}

Json ToJson(const MosRecord& r) {
  return Json{{"evaluator_id", r.evaluator_id},
              {"image_id", r.image_id},
              {"prompt_following", r.score(Dimension::kPromptFollowing)},
              {"structural_accuracy", r.score(Dimension::kStructuralAccuracy)},
              {"aesthetic_quality", r.score(Dimension::kAestheticQuality)},
              {"submitted_at", FormatTimestamp(r.submitted_at)}};
}

MosRecord MosFromJson(const Json& j) {
  MosRecord r;
  r.evaluator_id = StringField(j, "evaluator_id");
  r.image_id = StringField(j, "image_id");
  for (Dimension d : kAllDimensions) {
    const std::string name(DimensionName(d));
    r.scores[static_cast<int>(d)] = IntField(j, name.c_str());
  }
  r.submitted_at = TimeField(j, "submitted_at");
  ValidateMosRecord(r);
  return r;
}

Json ToJson(const AnchorPair& a) {
  return Json{{"anchor_id", a.anchor_id},
              {"prompt_id", a.prompt_id},
              {"image_good", a.image_good},
              {"image_bad", a.image_bad},
              {"verified_outcome", "image_good"}};
}

AnchorPair AnchorFromJson(const Json& j) {
  AnchorPair a;
  a.anchor_id = StringField(j, "anchor_id");
  a.prompt_id = StringField(j, "prompt_id");
  a.image_good = StringField(j, "image_good");
  a.image_bad = StringField(j, "image_bad");
  // verified_outcome names the better slot; normalize so image_good wins.
  if (j.contains("verified_outcome")) {
    const std::string v = StringField(j, "verified_outcome");
    if (v == "image_bad") {
      std::swap(a.image_good, a.image_bad);
    } else if (v != "image_good") {
      SchemaError("verified_outcome", "expected 'image_good' or 'image_bad'");
    }
  }
  if (a.image_good == a.image_bad) {
    throw Error(ErrorCode::kValidation,
                "anchor " + a.anchor_id + ": image_good == image_bad");
  }
  return a;
}

Json ToJson(const ModelEntry& m) {
  return Json{{"model_id", m.model_id},
              {"display_name", m.display_name},
              {"is_baseline", m.is_baseline}};
}

ModelEntry ModelEntryFromJson(const Json& j) {
  ModelEntry m;
  m.model_id = StringField(j, "model_id");
  m.display_name = j.contains("display_name") ? StringField(j, "display_name")
                                              : m.model_id;
  m.is_baseline = j.contains("is_baseline") && BoolField(j, "is_baseline");
  return m;
}

Json ToJson(const EvaluatorProfile& e) {
  Json flags = Json::array();
  for (const std::string& f : e.flag_reasons) flags.push_back(f);
  return Json{{"evaluator_id", e.evaluator_id},
              {"mode", ModeName(e.mode)},
              {"persona", PersonaName(e.persona)},
              {"qualified", e.qualified},
              {"n_votes", e.n_votes},
              {"mean_duration_s", e.mean_duration_s},
              {"stddev_duration_s", e.stddev_duration_s()},
              {"anchor_seen", e.anchor_seen},
              {"anchor_failed", e.anchor_failed},
              {"flagged", e.flagged},
              {"flag_reasons", flags}};
}

EvaluatorProfile EvaluatorFromJson(const Json& j) {
  EvaluatorProfile e;
  e.evaluator_id = StringField(j, "evaluator_id");
  e.mode = EnumField(j, "mode", &ParseMode);
  e.persona = j.contains("persona") ? EnumField(j, "persona", &ParsePersona)
                                    : Persona::kGeneralUser;
  e.qualified = j.contains("qualified") && BoolField(j, "qualified");
  e.flagged = j.contains("flagged") && BoolField(j, "flagged");
  if (j.contains("flag_reasons")) {
    if (!j["flag_reasons"].is_array()) {
      throw Error(ErrorCode::kSchema, "field flag_reasons must be an array");
    }
    for (const Json& f : j["flag_reasons"]) {
      if (!f.is_string()) throw Error(ErrorCode::kSchema, "flag_reasons must hold strings");
      e.flag_reasons.insert(f.get<std::string>());
    }
  }
  return e;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

namespace {

template <typename T>
std::vector<T> LoadJsonlFile(const std::filesystem::path& path,
                             T (*decode)(const Json&)) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return ReadJsonl<T>(in, decode);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<MatchRecord> LoadMatches(const std::filesystem::path& path) {
  return LoadJsonlFile<MatchRecord>(path, &MatchFromJson);
}
std::vector<MosRecord> LoadMos(const std::filesystem::path& path) {
  return LoadJsonlFile<MosRecord>(path, &MosFromJson);
}
std::vector<GeneratedImage> LoadImages(const std::filesystem::path& path) {
  return LoadJsonlFile<GeneratedImage>(path, &ImageFromJson);
}
std::vector<AnchorPair> LoadAnchors(const std::filesystem::path& path) {
  return LoadJsonlFile<AnchorPair>(path, &AnchorFromJson);
}
std::vector<EvaluatorProfile> LoadEvaluators(const std::filesystem::path& path) {
  return LoadJsonlFile<EvaluatorProfile>(path, &EvaluatorFromJson);
}

std::vector<ModelEntry> LoadModels(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  if (!j.is_array()) {
    throw Error(ErrorCode::kSchema, path.string() + ": expected a JSON array");
  }
  std::vector<ModelEntry> out;
  for (const Json& m : j) out.push_back(ModelEntryFromJson(m));
  return out;
}

template <typename T>
void SaveJsonl(const std::filesystem::path& path, const std::vector<T>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteJsonl(out, records);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

template void SaveJsonl(const std::filesystem::path&, const std::vector<MatchRecord>&);
template void SaveJsonl(const std::filesystem::path&, const std::vector<MosRecord>&);
template void SaveJsonl(const std::filesystem::path&, const std::vector<GeneratedImage>&);
template void SaveJsonl(const std::filesystem::path&, const std::vector<AnchorPair>&);
template void SaveJsonl(const std::filesystem::path&, const std::vector<PromptItem>&);
template void SaveJsonl(const std::filesystem::path&, const std::vector<EvaluatorProfile>&);

}  // namespace arena
