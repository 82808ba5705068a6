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

// Advisory prompt linting driven by declarative keyword/regex rules.
// Findings never block loading.

#ifndef ARENA_LINT_H_
#define ARENA_LINT_H_

#include <filesystem>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include "arena/benchmark.h"
#include "arena/json_io.h"

namespace arena {

inline constexpr char kRuleNonVisualizable[] = "non_visualizable_phrase";
inline constexpr char kRuleCulturalSpecificity[] = "cultural_specificity";
inline constexpr char kRuleDuplicateElement[] = "duplicate_element_within_label";
inline constexpr char kRuleSingleTestPoint[] = "single_test_point";

struct PatternRule {
  std::vector<std::string> patterns;  // ECMAScript, matched case-insensitively
  std::vector<std::regex> compiled;
};

struct LintRuleSet {
  std::optional<PatternRule> non_visualizable;
  std::optional<PatternRule> cultural_specificity;
  // Element words (textures, colors, ...) that should not repeat across
  // too many prompts sharing a capability label.
  std::vector<std::string> elements;
  int max_prompts_per_element = 2;
  bool single_test_point = false;

  bool empty() const {
    return !non_visualizable && !cultural_specificity && elements.empty() &&
           !single_test_point;
  }
};

LintRuleSet LintRuleSetFromJson(const Json& j);
LintRuleSet LoadLintRules(const std::filesystem::path& path);

struct LintFinding {
  PromptId prompt_id;
  std::string rule_id;
  std::string detail;
};

// `peers` supplies the rest of the benchmark for the duplicate-element rule;
// it may include `prompt` itself.
std::vector<LintFinding> LintPrompt(const PromptItem& prompt,
                                    const LintRuleSet& rules,
                                    std::span<const PromptItem> peers = {});
std::vector<LintFinding> LintBenchmark(const Benchmark& benchmark,
                                       const LintRuleSet& rules);
Json ToJson(const LintFinding& f);

}  // namespace arena

#endif  // ARENA_LINT_H_
