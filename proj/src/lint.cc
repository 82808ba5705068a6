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

#include "arena/lint.h"

#include <algorithm>
#include <cctype>

#include "arena/error.h"

namespace arena {
namespace {

PatternRule ParsePatternRule(const Json& j, const std::string& rule) {
  if (!j.is_object() || !j.contains("patterns") || !j["patterns"].is_array()) {
    throw Error(ErrorCode::kSchema, "rule '" + rule + "': expected {patterns: [...]}");
  }
  PatternRule r;
  for (const Json& p : j["patterns"]) {
    if (!p.is_string()) {
      throw Error(ErrorCode::kSchema, "rule '" + rule + "': patterns must be strings");
    }
    r.patterns.push_back(p.get<std::string>());
    try {
      r.compiled.emplace_back(r.patterns.back(),
                              std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::kValidation, "rule '" + rule + "': bad pattern '" +
                                              r.patterns.back() + "': " + e.what());
    }
  }
  return r;
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool ContainsWord(const std::string& lower_text, const std::string& word) {
  size_t pos = 0;
  while ((pos = lower_text.find(word, pos)) != std::string::npos) {
    const bool left_ok =
        pos == 0 || !std::isalnum(static_cast<unsigned char>(lower_text[pos - 1]));
    const size_t end = pos + word.size();
    const bool right_ok =
        end >= lower_text.size() ||
        !std::isalnum(static_cast<unsigned char>(lower_text[end]));
    if (left_ok && right_ok) return true;
    pos = end;
  }
  return false;
}

void ApplyPatterns(const PromptItem& prompt, const PatternRule& rule,
                   const char* rule_id, std::vector<LintFinding>& out) {
  for (size_t i = 0; i < rule.compiled.size(); ++i) {
    std::smatch m;
    if (std::regex_search(prompt.text, m, rule.compiled[i])) {
      out.push_back({prompt.prompt_id, rule_id, "matched '" + m.str() + "'"});
    }
  }
}

}  // namespace

LintRuleSet LintRuleSetFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "lint rules must be an object");
  LintRuleSet rules;
  for (const auto& [key, value] : j.items()) {
    if (key == kRuleNonVisualizable) {
      rules.non_visualizable = ParsePatternRule(value, key);
    } else if (key == kRuleCulturalSpecificity) {
      rules.cultural_specificity = ParsePatternRule(value, key);
    } else if (key == kRuleDuplicateElement) {
      if (!value.contains("elements") || !value["elements"].is_array()) {
        throw Error(ErrorCode::kSchema, "rule '" + key + "': expected {elements: [...]}");
      }
      for (const Json& e : value["elements"]) {
        rules.elements.push_back(Lower(e.get<std::string>()));
      }
      if (value.contains("max_prompts_per_element")) {
        rules.max_prompts_per_element = value["max_prompts_per_element"].get<int>();
      }
    } else if (key == kRuleSingleTestPoint) {
      rules.single_test_point =
          !value.contains("enabled") || value["enabled"].get<bool>();
    } else {
      throw Error(ErrorCode::kValidation, "unknown lint rule '" + key + "'");
    }
  }
  return rules;
}

LintRuleSet LoadLintRules(const std::filesystem::path& path) {
  try {
    return LintRuleSetFromJson(Json::parse(ReadFile(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
}

std::vector<LintFinding> LintPrompt(const PromptItem& prompt,
                                    const LintRuleSet& rules,
                                    std::span<const PromptItem> peers) {
  std::vector<LintFinding> out;
  if (rules.non_visualizable) {
    ApplyPatterns(prompt, *rules.non_visualizable, kRuleNonVisualizable, out);
  }
  if (rules.cultural_specificity) {
    ApplyPatterns(prompt, *rules.cultural_specificity, kRuleCulturalSpecificity, out);
  }
  if (!rules.elements.empty()) {
    const std::string text = Lower(prompt.text);
    for (const std::string& element : rules.elements) {
      if (!ContainsWord(text, element)) continue;
      for (Capability label : prompt.capability_labels) {
        int uses = 1;
        for (const PromptItem& peer : peers) {
          if (peer.prompt_id == prompt.prompt_id) continue;
          if (peer.capability_labels.contains(label) &&
              ContainsWord(Lower(peer.text), element)) {
            ++uses;
          }
        }
        if (uses > rules.max_prompts_per_element) {
          out.push_back({prompt.prompt_id, kRuleDuplicateElement,
                         "element '" + element + "' appears in " +
                             std::to_string(uses) + " prompts labeled " +
                             std::string(CapabilityName(label))});
        }
      }
    }
  }
  if (rules.single_test_point && prompt.capability_labels.size() == 1) {
    out.push_back({prompt.prompt_id, kRuleSingleTestPoint,
                   "prompt exercises a single capability (advisory)"});
  }
  return out;
}

std::vector<LintFinding> LintBenchmark(const Benchmark& benchmark,
                                       const LintRuleSet& rules) {
  std::vector<LintFinding> out;
  for (const PromptItem& p : benchmark.prompts()) {
    std::vector<LintFinding> f = LintPrompt(p, rules, benchmark.prompts());
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

Json ToJson(const LintFinding& f) {
  return Json{{"prompt_id", f.prompt_id}, {"rule", f.rule_id}, {"detail", f.detail}};
}

}  // namespace arena
