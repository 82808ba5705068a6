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

#include "arena/leaderboard.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "arena/error.h"

namespace arena {

double SingleMatchDelta(const OutcomeTable& table, const BtFit& fit,
                        const ModelId& model, const FitOptions& options) {
  const int m = table.Index(model);
  const int fm = fit.Index(model);
  if (m < 0 || fm < 0) throw Error(ErrorCode::kNotFound, "unknown model: " + model);
  int opponent = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < table.size(); ++i) {
    if (i == m) continue;
    const int fi = fit.Index(table.models[i]);
    if (fi < 0) continue;
    const double gap = std::abs(fit.elo[fi] - fit.elo[fm]);
    if (gap < best) {
      best = gap;
      opponent = i;
    }
  }
  if (opponent < 0) return 0.0;
  OutcomeTable perturbed = table;
  perturbed.wins(m, opponent) += 1;
  const BtFit refit = FitBt(perturbed, fit.baseline, options);
  if (model == fit.baseline) {
    const ModelId& opp = table.models[opponent];
    return std::abs(refit.Elo(opp) - fit.Elo(opp));
  }
  return std::abs(refit.Elo(model) - fit.Elo(model));
}

EligibilityReport Eligibility(const OutcomeTable& table, const BtFit& fit,
                              const ModelId& model, const EligibilityOptions& options) {
  const int i = fit.Index(model);
  if (i < 0) throw Error(ErrorCode::kNotFound, "unknown model: " + model);
  EligibilityReport report;
  report.model_id = model;
  report.n_matches = fit.n_matches[i];
  if (model == fit.baseline) {
    report.ci_width = 0.0;
  } else if (fit.ci95[i]) {
    report.ci_width = fit.ci95[i]->width();
  }
  report.single_match_delta = SingleMatchDelta(table, fit, model, options.fit);
  if (!report.ci_width) {
    report.reasons.push_back("ci_unavailable");
  } else if (*report.ci_width > options.ci_max) {
    report.reasons.push_back("ci_width");
  }
  if (report.single_match_delta > options.delta_max) {
    report.reasons.push_back("single_match_delta");
  }
  report.eligible = report.reasons.empty();
  return report;
}

std::vector<LeaderboardRow> RankRows(const BtFit& fit,
                                     const std::vector<EligibilityReport>& reports) {
  const int n = static_cast<int>(fit.models.size());
  std::vector<LeaderboardRow> rows(n);
  for (int i = 0; i < n; ++i) {
    LeaderboardRow& r = rows[i];
    r.model_id = fit.models[i];
    r.elo = fit.elo[i];
    if (fit.ci95[i]) {
      r.ci_low = fit.ci95[i]->low;
      r.ci_high = fit.ci95[i]->high;
    }
    r.n_matches = fit.n_matches[i];
    r.win_rate = fit.win_rate[i];
    for (const EligibilityReport& e : reports) {
      if (e.model_id == r.model_id) r.eligible = e.eligible;
    }
  }
  for (LeaderboardRow& r : rows) {
    const double high = r.ci_high.value_or(r.elo);
    r.rank = 1 + static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const auto& o) {
               return o.ci_low.value_or(o.elo) > high;
             }));
  }
  std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.elo != b.elo) return a.elo > b.elo;
    return a.model_id < b.model_id;
  });
  return rows;
}

Leaderboard ComputeLeaderboard(const OutcomeTable& table, const ModelId& baseline,
                               const LeaderboardOptions& options) {
  Leaderboard board;
  board.fit = FitBt(table, baseline, options.eligibility.fit);
  if (options.with_bootstrap) {
    BootstrapOptions bopts = options.bootstrap;
    bopts.fit = options.eligibility.fit;
    const BootstrapResult boot = BootstrapTable(table, baseline, bopts);
    for (const auto& [model, ci] : boot.ci) {
      board.fit.ci95[board.fit.Index(model)] = ci;
    }
  }
  std::vector<EligibilityReport> reports;
  for (const ModelId& m : board.fit.models) {
    reports.push_back(Eligibility(table, board.fit, m, options.eligibility));
  }
  board.rows = RankRows(board.fit, reports);
  for (const LeaderboardRow& r : board.rows) {
    for (EligibilityReport& e : reports) {
      if (e.model_id == r.model_id) board.eligibility.push_back(std::move(e));
    }
  }
  return board;
}

Json ToJson(const LeaderboardRow& row) {
  Json j;
  j["model_id"] = row.model_id;
  j["elo"] = row.elo;
  j["ci_low"] = row.ci_low ? Json(*row.ci_low) : Json(nullptr);
  j["ci_high"] = row.ci_high ? Json(*row.ci_high) : Json(nullptr);
  j["rank"] = row.rank;
  j["n_matches"] = static_cast<int64_t>(std::llround(row.n_matches));
  j["win_rate"] = row.win_rate;
  j["eligible"] = row.eligible;
  return j;
}

Json ToJson(const EligibilityReport& report) {
  Json j;
  j["model_id"] = report.model_id;
  j["eligible"] = report.eligible;
  j["ci_width"] = report.ci_width ? Json(*report.ci_width) : Json(nullptr);
  j["single_match_delta"] = report.single_match_delta;
  j["n_matches"] = static_cast<int64_t>(std::llround(report.n_matches));
  j["reasons"] = report.reasons;
  return j;
}

Json LeaderboardJson(const std::vector<LeaderboardRow>& rows) {
  Json out = Json::array();
  for (const LeaderboardRow& r : rows) out.push_back(ToJson(r));
  return out;
}

}  // namespace arena
