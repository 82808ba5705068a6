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

// JSON and JSON Lines encodings of the domain records.
//
// Decoders throw Error(kSchema) naming the offending field; the JSONL
// readers prefix the message with the 1-based line number.

#ifndef ARENA_JSON_IO_H_
#define ARENA_JSON_IO_H_

#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "arena/error.h"
#include "arena/types.h"
#include "json.hpp"

namespace arena {

using Json = nlohmann::ordered_json;

Json ToJson(const MatchRecord& m);
Json ToJson(const PromptItem& p);
Json ToJson(const GeneratedImage& img);
Json ToJson(const MosRecord& r);
Json ToJson(const AnchorPair& a);
Json ToJson(const ModelEntry& m);
// Registration fields plus behavioral statistics.
Json ToJson(const EvaluatorProfile& e);

MatchRecord MatchFromJson(const Json& j);
PromptItem PromptFromJson(const Json& j);
GeneratedImage ImageFromJson(const Json& j);
MosRecord MosFromJson(const Json& j);
AnchorPair AnchorFromJson(const Json& j);
ModelEntry ModelEntryFromJson(const Json& j);
EvaluatorProfile EvaluatorFromJson(const Json& j);

// Parses one JSON document per non-blank line.
template <typename T>
std::vector<T> ReadJsonl(std::istream& in,
                         const std::function<T(const Json&)>& decode) {
  std::vector<T> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(decode(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void WriteJsonl(std::ostream& out, const std::vector<T>& records) {
  for (const T& r : records) out << ToJson(r).dump() << '\n';
}

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& content);

std::vector<MatchRecord> LoadMatches(const std::filesystem::path& path);
std::vector<MosRecord> LoadMos(const std::filesystem::path& path);
std::vector<GeneratedImage> LoadImages(const std::filesystem::path& path);
std::vector<AnchorPair> LoadAnchors(const std::filesystem::path& path);
std::vector<EvaluatorProfile> LoadEvaluators(const std::filesystem::path& path);
// A JSON array of ModelEntry objects.
std::vector<ModelEntry> LoadModels(const std::filesystem::path& path);

template <typename T>
void SaveJsonl(const std::filesystem::path& path, const std::vector<T>& records);

}  // namespace arena

#endif  // ARENA_JSON_IO_H_
