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

#include "arena/benchmark.h"

#include <cmath>
#include <fstream>

#include "arena/error.h"

namespace arena {

DistributionSpec DistributionSpecFromJson(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kSchema, "distribution spec must be a JSON object");
  }
  DistributionSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::kSchema, "field '" + key + "': expected number");
    }
    const double f = value.get<double>();
    if (f < 0.0 || f > 1.0) {
      throw Error(ErrorCode::kValidation,
                  "field '" + key + "': fraction outside [0,1]");
    }
    if (auto s = ParseScenario(key)) {
      spec.scenario[*s] = f;
    } else if (auto c = ParseCapability(key)) {
      spec.capability[*c] = f;
    } else {
      throw Error(ErrorCode::kValidation,
                  "label '" + key + "' is outside the vocabulary");
    }
  }
  if (!spec.scenario.empty()) {
    double total = 0.0;
    for (const auto& [s, f] : spec.scenario) total += f;
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCode::kValidation,
                  "scenario target fractions sum to " + std::to_string(total) +
                      ", expected 1");
    }
  }
  return spec;
}

DistributionSpec ReferenceDistribution() {
  DistributionSpec d;
  d.scenario = {{Scenario::kFilm, 0.20},
                {Scenario::kArt, 0.21},
                {Scenario::kEntertainment, 0.12},
                {Scenario::kAestheticDesign, 0.25},
                {Scenario::kFunctionalDesign, 0.22}};
  d.capability = {{Capability::kQuantity, 0.04},
                  {Capability::kAttribute, 0.09},
                  {Capability::kRelation, 0.12},
                  {Capability::kActionState, 0.10},
                  {Capability::kStyle, 0.64},
                  {Capability::kAesthetic, 0.35},
                  {Capability::kAtmosphere, 0.06},
                  {Capability::kMultiEntityFeatureMatching, 0.08},
                  {Capability::kLayoutTypography, 0.05},
                  {Capability::kAntiRealism, 0.08},
                  {Capability::kNegation, 0.02},
                  {Capability::kPronounReference, 0.01},
                  {Capability::kConsistency, 0.02}};
  return d;
}

Json ToJson(const DistributionSpec& spec) {
  Json j = Json::object();
  for (const auto& [s, f] : spec.scenario) j[std::string(ScenarioName(s))] = f;
  for (const auto& [c, f] : spec.capability) j[std::string(CapabilityName(c))] = f;
  return j;
}

void ValidatePromptItem(const PromptItem& p) {
  if (p.prompt_id.empty()) {
    throw Error(ErrorCode::kValidation, "prompt_id is empty");
  }
  const size_t n = p.capability_labels.size();
  if (n < 1 || n > 4) {
    throw Error(ErrorCode::kValidation,
                "prompt " + p.prompt_id + ": label count out of range (" +
                    std::to_string(n) + ", expected 1-4)");
  }
  for (const TestPointSpec& tp : p.test_points) {
    if (!p.capability_labels.contains(tp.capability)) {
      throw Error(ErrorCode::kValidation,
                  "prompt " + p.prompt_id + ": test point capability '" +
                      std::string(CapabilityName(tp.capability)) +
                      "' is not among the prompt's capability labels");
    }
  }
}

Benchmark::Benchmark(std::vector<PromptItem> prompts,
                     DistributionSpec distribution_spec)
    : prompts_(std::move(prompts)), spec_(std::move(distribution_spec)) {
  for (size_t i = 0; i < prompts_.size(); ++i) {
    ValidatePromptItem(prompts_[i]);
    if (!index_.emplace(prompts_[i].prompt_id, i).second) {
      throw Error(ErrorCode::kValidation,
                  "duplicate prompt_id: " + prompts_[i].prompt_id);
    }
  }
}

const PromptItem* Benchmark::Find(const PromptId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &prompts_[it->second];
}

Benchmark LoadBenchmark(std::istream& in) {
  std::vector<PromptItem> prompts;
  std::map<PromptId, int> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    try {
      PromptItem p = PromptFromJson(Json::parse(line));
      ValidatePromptItem(p);
      auto [it, inserted] = seen.emplace(p.prompt_id, line_no);
      if (!inserted) {
        throw Error(ErrorCode::kValidation,
                    "duplicate prompt_id '" + p.prompt_id +
                        "' (first seen on line " + std::to_string(it->second) +
                        ")");
      }
      prompts.push_back(std::move(p));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchema, where + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  return Benchmark(std::move(prompts));
}

Benchmark LoadBenchmarkFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return LoadBenchmark(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteBenchmark(std::ostream& out, const Benchmark& benchmark) {
  for (const PromptItem& p : benchmark.prompts()) out << ToJson(p).dump() << '\n';
}

DistributionSpec ObservedDistribution(const Benchmark& benchmark) {
  DistributionSpec observed;
  if (benchmark.empty()) return observed;
  const double n = static_cast<double>(benchmark.size());
  std::map<Scenario, int> scenario_counts;
  std::map<Capability, int> capability_counts;
  for (const PromptItem& p : benchmark.prompts()) {
    ++scenario_counts[p.scenario_label];
    for (Capability c : p.capability_labels) ++capability_counts[c];
  }
  for (Scenario s : kAllScenarios) observed.scenario[s] = scenario_counts[s] / n;
  for (int i = 0; i < kNumCapabilities; ++i) {
    const auto c = static_cast<Capability>(i);
    observed.capability[c] = capability_counts[c] / n;
  }
  return observed;
}

DistributionReport ValidateLabelDistribution(const Benchmark& benchmark,
                                             const DistributionSpec& targets,
                                             double tolerance) {
  if (benchmark.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "benchmark is empty");
  }
  DistributionReport report;
  if (targets.empty()) {
    report.warnings.push_back("empty target distribution; nothing checked");
    return report;
  }
  const DistributionSpec observed = ObservedDistribution(benchmark);
  // Guards exact-match comparisons such as |0.20 - 0.15| vs 0.05.
  constexpr double kSlack = 1e-12;
  auto check = [&](std::string label, bool is_scenario, double target,
                   double seen) {
    LabelCheck c;
    c.label = std::move(label);
    c.is_scenario = is_scenario;
    c.target = target;
    c.observed = seen;
    c.deviation = std::abs(target - seen);
    c.pass = c.deviation <= tolerance + kSlack;
    report.pass = report.pass && c.pass;
    report.labels.push_back(std::move(c));
  };
  for (const auto& [s, target] : targets.scenario) {
    check(std::string(ScenarioName(s)), true, target, observed.scenario.at(s));
  }
  for (const auto& [c, target] : targets.capability) {
    check(std::string(CapabilityName(c)), false, target,
          observed.capability.at(c));
  }
  return report;
}

Json ToJson(const DistributionReport& report) {
  Json labels = Json::array();
  for (const LabelCheck& c : report.labels) {
    labels.push_back({{"label", c.label},
                      {"kind", c.is_scenario ? "scenario" : "capability"},
                      {"target", c.target},
                      {"observed", c.observed},
                      {"deviation", c.deviation},
                      {"pass", c.pass}});
  }
  return Json{{"pass", report.pass},
              {"labels", labels},
              {"warnings", report.warnings}};
}

std::vector<TestPointSample> DecomposeTestPoints(const PromptItem& prompt) {
  std::vector<TestPointSample> out;
  out.reserve(prompt.test_points.size());
  for (const TestPointSpec& tp : prompt.test_points) {
    out.push_back({prompt.prompt_id, tp.capability, tp.requirement_text});
  }
  return out;
}

}  // namespace arena
