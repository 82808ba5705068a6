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

#include "arena/prompt_elo.h"

#include <cmath>
#include <map>

#include "arena/error.h"

namespace arena {

std::vector<PromptDecomposition> PromptEloContributionsAll(
    std::span<const MatchRecord> matches, const ModelId& baseline,
    const FitOptions& options, const MatchFilter& filter) {
  const OutcomeTable full = BuildOutcomeTable(matches, filter);
  const int n = full.size();
  const BtFit full_fit = FitBt(full, baseline, options);

  // Schedule with every match forced to a tie, plus per-prompt tables.
  Eigen::MatrixXd all_tied = Eigen::MatrixXd::Zero(n, n);
  std::map<PromptId, OutcomeTable> per_prompt;
  for (const MatchRecord& m : matches) {
    if (filter && !filter(m)) continue;
    const int l = full.Index(m.model_left), r = full.Index(m.model_right);
    all_tied(l, r) += 1;
    all_tied(r, l) += 1;
    auto [it, inserted] = per_prompt.try_emplace(m.prompt_id);
    OutcomeTable& t = it->second;
    if (inserted) {
      t.models = full.models;
      t.wins = Eigen::MatrixXd::Zero(n, n);
      t.ties = Eigen::MatrixXd::Zero(n, n);
    }
    switch (m.outcome) {
      case Outcome::kLeftWins: t.wins(l, r) += 1; break;
      case Outcome::kRightWins: t.wins(r, l) += 1; break;
      default:
        t.ties(l, r) += 1;
        t.ties(r, l) += 1;
    }
  }

  std::vector<PromptDecomposition> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].model_id = full.models[i];
    out[i].full_delta = full_fit.elo[i] - kBaselineElo;
  }
  for (const auto& [prompt, t] : per_prompt) {
    OutcomeTable modified;
    modified.models = full.models;
    modified.wins = t.wins;
    // Matches on other prompts become ties; this prompt keeps its outcomes.
    const Eigen::MatrixXd own = t.wins + t.wins.transpose() + t.ties;
    modified.ties = all_tied - own + t.ties;
    const BtFit fit = FitBt(modified, baseline, options);
    for (int i = 0; i < n; ++i) {
      const double delta = fit.elo[i] - kBaselineElo;
      out[i].contributions.push_back({prompt, full.models[i], delta});
      out[i].sum_delta += delta;
    }
  }
  for (PromptDecomposition& d : out) {
    if (d.full_delta != 0.0) {
      d.reconstruction_error = std::abs(d.sum_delta - d.full_delta) / std::abs(d.full_delta);
    }
  }
  return out;
}

PromptDecomposition PromptEloContributions(std::span<const MatchRecord> matches,
                                           const ModelId& baseline,
                                           const ModelId& model,
                                           const FitOptions& options,
                                           const MatchFilter& filter) {
  bool present = false;
  for (const MatchRecord& m : matches) {
    if (filter && !filter(m)) continue;
    if (m.model_left == model || m.model_right == model) {
      present = true;
      break;
    }
  }
  if (!present) throw Error(ErrorCode::kNotFound, "model has no matches: " + model);
  for (PromptDecomposition& d : PromptEloContributionsAll(matches, baseline, options, filter)) {
    if (d.model_id == model) return std::move(d);
  }
  throw Error(ErrorCode::kNotFound, "model has no matches: " + model);
}

Json ToJson(const PromptDecomposition& d) {
  Json contributions = Json::array();
  for (const PromptContribution& c : d.contributions) {
    contributions.push_back({{"prompt_id", c.prompt_id}, {"delta_elo", c.delta_elo}});
  }
  return Json{{"model_id", d.model_id},
              {"full_delta", d.full_delta},
              {"sum_delta", d.sum_delta},
              {"reconstruction_error",
               d.reconstruction_error ? Json(*d.reconstruction_error) : Json(nullptr)},
              {"contributions", contributions}};
}

}  // namespace arena
