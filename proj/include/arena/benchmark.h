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

// The prompt benchmark: loading with label-schema validation, label
// distribution checks and test-point decomposition.

#ifndef ARENA_BENCHMARK_H_
#define ARENA_BENCHMARK_H_

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "arena/json_io.h"
#include "arena/types.h"

namespace arena {

// Target fraction per label. Scenario fractions are shares of prompts and
// sum to 1; capability fractions are per-label coverage rates (a prompt with
// three labels counts toward all three), so they need not sum to 1.
struct DistributionSpec {
  std::map<Scenario, double> scenario;
  std::map<Capability, double> capability;

  bool empty() const { return scenario.empty() && capability.empty(); }
};

// Flat JSON object {label: fraction}; labels resolve against both
// vocabularies. Throws kValidation on unknown labels or when the scenario
// fractions do not sum to 1 +- 1e-9.
DistributionSpec DistributionSpecFromJson(const Json& j);
Json ToJson(const DistributionSpec& spec);

// Label shares of the reference benchmark composition.
DistributionSpec ReferenceDistribution();

class Benchmark {
 public:
  Benchmark() = default;
  // Throws kValidation on duplicate ids or any PromptItem invariant.
  explicit Benchmark(std::vector<PromptItem> prompts,
                     DistributionSpec distribution_spec = {});

  const std::vector<PromptItem>& prompts() const { return prompts_; }
  const DistributionSpec& distribution_spec() const { return spec_; }
  const PromptItem* Find(const PromptId& id) const;
  size_t size() const { return prompts_.size(); }
  bool empty() const { return prompts_.empty(); }

  bool operator==(const Benchmark& other) const {
    return prompts_ == other.prompts_;
  }

 private:
  std::vector<PromptItem> prompts_;
  DistributionSpec spec_;
  std::map<PromptId, size_t> index_;
};

// Throws kValidation with a message containing "label count out of range"
// when a prompt carries 0 or more than 4 capability labels.
void ValidatePromptItem(const PromptItem& p);

Benchmark LoadBenchmark(std::istream& in);
Benchmark LoadBenchmarkFile(const std::filesystem::path& path);
void WriteBenchmark(std::ostream& out, const Benchmark& benchmark);

// Observed label fractions of a benchmark, in the same shape as a target.
DistributionSpec ObservedDistribution(const Benchmark& benchmark);

struct LabelCheck {
  std::string label;
  bool is_scenario = false;
  double target = 0.0;
  double observed = 0.0;
  double deviation = 0.0;
  bool pass = true;
};

struct DistributionReport {
  std::vector<LabelCheck> labels;
  bool pass = true;
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultDistributionTolerance = 0.05;

DistributionReport ValidateLabelDistribution(
    const Benchmark& benchmark, const DistributionSpec& targets,
    double tolerance = kDefaultDistributionTolerance);
Json ToJson(const DistributionReport& report);

struct TestPointSample {
  PromptId prompt_id;
  Capability capability;
  std::string requirement_text;
};

std::vector<TestPointSample> DecomposeTestPoints(const PromptItem& prompt);

}  // namespace arena

#endif  // ARENA_BENCHMARK_H_
