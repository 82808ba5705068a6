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

#include "arena/quality_control.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arena/error.h"
#include "arena/stats.h"
#include "spdlog/spdlog.h"

namespace arena {

double SpeedZ(double duration_s, double mean_s, double sd_s, double sd_floor_s) {
  return (mean_s - duration_s) / std::max(sd_s, sd_floor_s);
}

int LongestRun(std::span<const MatchRecord> votes) {
  int best = 0, run = 0;
  for (size_t i = 0; i < votes.size(); ++i) {
    run = (i > 0 && votes[i].outcome == votes[i - 1].outcome) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

namespace {

// Returns the speed statistic alongside the flags so reports can show it.
std::set<std::string> Detect(std::span<const MatchRecord> votes, const TemporalOptions& options,
                             const std::optional<DurationReference>& reference,
                             double* speed_z) {
  std::set<std::string> flags;
  *speed_z = 0.0;
  if (static_cast<int>(votes.size()) < options.min_votes) return flags;
  std::vector<double> d;
  d.reserve(votes.size());
  for (const MatchRecord& v : votes) d.push_back(v.duration_s);
  const double mean = Mean(d);
  if (reference) {
    *speed_z = SpeedZ(mean, reference->mean_s, reference->sd_s, options.sd_floor_s);
  } else {
    const double sd = std::sqrt(SampleVariance(d));
    double worst = -std::numeric_limits<double>::infinity();
    for (double x : d) worst = std::max(worst, SpeedZ(x, mean, sd, options.sd_floor_s));
    *speed_z = worst;
  }
  if (*speed_z > options.z_threshold) flags.insert(kFlagSpeed);
  if (LongestRun(votes) >= options.run_threshold) flags.insert(kFlagRepetition);
  return flags;
}

}  // namespace

std::set<std::string> DetectTemporalAnomalies(std::span<const MatchRecord> votes,
                                              const TemporalOptions& options,
                                              const std::optional<DurationReference>& reference) {
  double z;
  return Detect(votes, options, reference, &z);
}

DurationReference RobustDurationReference(std::vector<double> evaluator_means) {
  if (evaluator_means.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "duration reference needs at least one evaluator");
  }
  const double median = Percentile(evaluator_means, 0.5);
  for (double& x : evaluator_means) x = std::abs(x - median);
  // 1.4826 makes the MAD consistent for the normal standard deviation.
  return {median, 1.4826 * Percentile(std::move(evaluator_means), 0.5)};
}

bool AnchorFailureAssess(const EvaluatorProfile& profile, int min_anchors,
                         double fail_rate_threshold) {
  if (profile.anchor_seen < min_anchors || profile.anchor_seen == 0) return false;
  return static_cast<double>(profile.anchor_failed) / static_cast<double>(profile.anchor_seen) >
         fail_rate_threshold;
}

double CohenKappa(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "kappa: label sequences differ in length");
  }
  if (a.empty()) throw Error(ErrorCode::kInvalidArgument, "kappa: empty label sequences");
  const double n = static_cast<double>(a.size());
  std::map<std::string, double> ma, mb;
  double agree = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, count] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0) return 1.0;  // both raters used one label throughout
  return (po - pe) / (1.0 - pe);
}

double CohenKappa(std::span<const Outcome> a, std::span<const Outcome> b) {
  std::vector<std::string> sa, sb;
  for (Outcome o : a) sa.emplace_back(OutcomeName(o));
  for (Outcome o : b) sb.emplace_back(OutcomeName(o));
  return CohenKappa(std::span<const std::string>(sa), std::span<const std::string>(sb));
}

QualificationResult QualifyExpert(std::span<const Outcome> candidate,
                                  std::span<const Outcome> consensus, double agreement_min,
                                  double kappa_min) {
  QualificationResult r;
  r.kappa = CohenKappa(candidate, consensus);
  r.n_items = static_cast<int>(candidate.size());
  int agree = 0;
  for (size_t i = 0; i < candidate.size(); ++i) agree += candidate[i] == consensus[i];
  r.agreement = static_cast<double>(agree) / static_cast<double>(candidate.size());
  r.passed = r.agreement >= agreement_min && r.kappa > kappa_min;
  return r;
}

size_t AuditSize(size_t n, double fraction) {
  // The epsilon keeps products such as 0.07 * 100 from rounding up.
  const double want = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::min(n, static_cast<size_t>(std::max(0.0, want)));
}

std::vector<MatchRecord> ApplyFlags(std::span<const MatchRecord> matches,
                                    std::span<const EvaluatorProfile> profiles) {
  std::set<EvaluatorId> flagged;
  for (const EvaluatorProfile& p : profiles) {
    if (p.flagged) flagged.insert(p.evaluator_id);
  }
  std::vector<MatchRecord> out;
  out.reserve(matches.size());
  for (const MatchRecord& m : matches) {
    if (!flagged.contains(m.evaluator_id)) out.push_back(m);
  }
  return out;
}

bool AnchorVoteCorrect(const MatchRecord& vote, const AnchorPair& anchor) {
  if (vote.outcome == Outcome::kLeftWins) return vote.image_left == anchor.image_good;
  if (vote.outcome == Outcome::kRightWins) return vote.image_right == anchor.image_good;
  return false;
}

AnchorIndex::AnchorIndex(std::span<const AnchorPair> anchors)
    : anchors_(anchors.begin(), anchors.end()) {
  for (size_t i = 0; i < anchors_.size(); ++i) {
    const AnchorPair& a = anchors_[i];
    by_images_[std::minmax(a.image_good, a.image_bad)] = i;
  }
}

const AnchorPair* AnchorIndex::Find(const ImageId& a, const ImageId& b) const {
  auto it = by_images_.find(std::minmax(a, b));
  return it == by_images_.end() ? nullptr : &anchors_[it->second];
}

QcOptions QcOptionsFromJson(const Json& j) {
  QcOptions o;
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "qc options must be an object");
  try {
    o.temporal.z_threshold = j.value("z_threshold", o.temporal.z_threshold);
    o.temporal.run_threshold = j.value("run_threshold", o.temporal.run_threshold);
    o.temporal.min_votes = j.value("min_votes", o.temporal.min_votes);
    o.temporal.sd_floor_s = j.value("sd_floor_s", o.temporal.sd_floor_s);
    o.min_anchors = j.value("min_anchors", o.min_anchors);
    o.anchor_fail_threshold = j.value("anchor_fail_threshold", o.anchor_fail_threshold);
    o.population_reference = j.value("population_reference", o.population_reference);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("qc options: ") + e.what());
  }
  return o;
}

QcReport RunQc(std::span<const MatchRecord> matches, std::span<const AnchorPair> anchors,
               std::span<const EvaluatorProfile> known, const QcOptions& options) {
  std::map<EvaluatorId, std::vector<MatchRecord>> by_evaluator;
  for (const MatchRecord& m : matches) by_evaluator[m.evaluator_id].push_back(m);
  std::map<EvaluatorId, EvaluatorProfile> profiles;
  for (const EvaluatorProfile& p : known) {
    EvaluatorProfile fresh;
    fresh.evaluator_id = p.evaluator_id;
    fresh.mode = p.mode;
    fresh.persona = p.persona;
    fresh.qualified = p.qualified;
    profiles[p.evaluator_id] = fresh;
  }
  const AnchorIndex index(anchors);
  QcReport report;
  for (auto& [id, votes] : by_evaluator) {
    std::stable_sort(votes.begin(), votes.end(), [](const MatchRecord& a, const MatchRecord& b) {
      return a.submitted_at < b.submitted_at;
    });
    EvaluatorProfile& p = profiles[id];
    p.evaluator_id = id;
    for (const MatchRecord& v : votes) {
      p.ObserveDuration(v.duration_s);
      if (!v.is_anchor) continue;
      const AnchorPair* anchor = index.Find(v.image_left, v.image_right);
      if (!anchor) {
        ++report.unknown_anchor_votes;
        continue;
      }
      ++p.anchor_seen;
      if (!AnchorVoteCorrect(v, *anchor)) ++p.anchor_failed;
    }
  }
  if (report.unknown_anchor_votes > 0) {
    spdlog::warn("{} anchor votes reference no known anchor pair", report.unknown_anchor_votes);
  }
  if (options.population_reference) {
    std::vector<double> means;
    for (const auto& [id, votes] : by_evaluator) {
      if (static_cast<int>(votes.size()) >= options.temporal.min_votes) {
        means.push_back(profiles[id].mean_duration_s);
      }
    }
    if (!means.empty()) report.reference = RobustDurationReference(std::move(means));
  }
  for (auto& [id, p] : profiles) {
    QcEvaluatorReport r;
    r.evaluator_id = id;
    auto it = by_evaluator.find(id);
    if (it != by_evaluator.end()) {
      for (const std::string& f :
           Detect(it->second, options.temporal, report.reference, &r.speed_z)) {
        p.Flag(f);
      }
      r.longest_run = LongestRun(it->second);
    }
    if (AnchorFailureAssess(p, options.min_anchors, options.anchor_fail_threshold)) {
      p.Flag(kFlagAnchor);
    }
    r.flags = p.flag_reasons;
    r.n_votes = p.n_votes;
    r.mean_duration_s = p.mean_duration_s;
    r.stddev_duration_s = p.stddev_duration_s();
    r.anchor_seen = p.anchor_seen;
    r.anchor_failed = p.anchor_failed;
    report.evaluators.push_back(std::move(r));
    report.profiles.push_back(p);
  }
  return report;
}

Json ToJson(const QcEvaluatorReport& report) {
  Json j;
  j["evaluator_id"] = report.evaluator_id;
  j["flags"] = Json::array();
  for (const std::string& f : report.flags) j["flags"].push_back(f);
  Json s;
  s["n_votes"] = report.n_votes;
  s["mean_duration_s"] = report.mean_duration_s;
  s["stddev_duration_s"] = report.stddev_duration_s;
  s["speed_z"] = report.speed_z;
  s["longest_run"] = report.longest_run;
  s["anchor_seen"] = report.anchor_seen;
  s["anchor_failed"] = report.anchor_failed;
  j["statistics"] = s;
  return j;
}

Json ToJson(const QcReport& report) {
  Json j;
  j["evaluators"] = Json::array();
  int64_t flagged = 0;
  for (const QcEvaluatorReport& e : report.evaluators) {
    j["evaluators"].push_back(ToJson(e));
    flagged += !e.flags.empty();
  }
  j["n_evaluators"] = report.evaluators.size();
  j["n_flagged"] = flagged;
  if (report.reference) {
    j["duration_reference"] = {{"mean_s", report.reference->mean_s},
                               {"sd_s", report.reference->sd_s}};
  } else {
    j["duration_reference"] = nullptr;
  }
  j["unknown_anchor_votes"] = report.unknown_anchor_votes;
  return j;
}

}  // namespace arena
