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

// Offline command line over the arena engines.
//
// Exit status: 0 on success, 1 on validation errors (bad input, bad
// flags, fits that cannot run), 2 on I/O errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arena/benchmark.h"
#include "arena/bootstrap.h"
#include "arena/error.h"
#include "arena/joint_analysis.h"
#include "arena/json_io.h"
#include "arena/leaderboard.h"
#include "arena/lint.h"
#include "arena/mos.h"
#include "arena/prompt_elo.h"
#include "arena/quality_control.h"
#include "arena/rating.h"
#include "arena/service.h"
#include "arena/simulator.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace fs = std::filesystem;

namespace arena {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void Print(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::optional<Mode> ParseModeFlag(const std::string& s) {
  if (s.empty() || s == "all") return std::nullopt;
  auto m = ParseMode(s);
  if (!m) throw Error(ErrorCode::kInvalidArgument, "unknown mode: " + s);
  return m;
}

// Anchors are never rated; mode and scenario narrow further.
MatchFilter RatingFilter(const std::string& mode, const std::string& scenario,
                         const std::optional<Benchmark>& benchmark) {
  std::vector<MatchFilter> filters = {ExcludeAnchors()};
  if (auto m = ParseModeFlag(mode)) filters.push_back(InMode(*m));
  if (!scenario.empty() && scenario != "Overall") {
    auto s = ParseScenario(scenario);
    if (!s) throw Error(ErrorCode::kNotFound, "unknown scenario: " + scenario);
    if (!benchmark) throw Error(ErrorCode::kInvalidArgument, "--scenario needs --benchmark");
    filters.push_back(InScenario(*benchmark, *s));
  }
  return AllOf(std::move(filters));
}

std::vector<MatchRecord> LoadRatedMatches(const std::string& path,
                                          const std::string& evaluators_path) {
  std::vector<MatchRecord> matches = LoadMatches(path);
  if (!evaluators_path.empty()) {
    matches = ApplyFlags(matches, LoadEvaluators(evaluators_path));
  }
  return matches;
}

struct FitArgs {
  std::string in;
  std::string baseline;
  std::string mode;
  std::string scenario;
  std::string benchmark;
  std::string evaluators;
  int rounds = 1000;
  uint64_t seed = 0;
  double ci_max = 20.0;
  double delta_max = 3.0;
};

void AddFitFlags(CLI::App* cmd, FitArgs* a) {
  cmd->add_option("--in", a->in, "match log (JSON Lines)")->required();
  cmd->add_option("--baseline", a->baseline, "baseline model id")->required();
  cmd->add_option("--mode", a->mode, "expert, public or all");
  cmd->add_option("--scenario", a->scenario, "restrict to one scenario");
  cmd->add_option("--benchmark", a->benchmark, "benchmark JSON Lines (for --scenario)");
  cmd->add_option("--evaluators", a->evaluators, "profiles; flagged evaluators are dropped");
  cmd->add_option("--ci-max", a->ci_max, "eligibility CI width bound");
  cmd->add_option("--delta-max", a->delta_max, "eligibility single-match bound");
}

Leaderboard RunFit(const FitArgs& a, bool bootstrap) {
  std::optional<Benchmark> bench;
  if (!a.benchmark.empty()) bench = LoadBenchmarkFile(a.benchmark);
  const auto matches = LoadRatedMatches(a.in, a.evaluators);
  const OutcomeTable table = BuildOutcomeTable(matches, RatingFilter(a.mode, a.scenario, bench));
  LeaderboardOptions opts;
  opts.with_bootstrap = bootstrap;
  opts.bootstrap.rounds = a.rounds;
  opts.bootstrap.seed = a.seed;
  opts.eligibility.ci_max = a.ci_max;
  opts.eligibility.delta_max = a.delta_max;
  return ComputeLeaderboard(table, a.baseline, opts);
}

Json EligibilityJson(const Leaderboard& board) {
  Json out = Json::array();
  for (const EligibilityReport& r : board.eligibility) out.push_back(ToJson(r));
  return out;
}

int Simulate(const std::string& config_path, const std::string& out_dir,
             const std::string& benchmark_path) {
  const SimConfig config = LoadSimConfig(config_path);
  std::optional<Benchmark> bench;
  if (!benchmark_path.empty()) bench = LoadBenchmarkFile(benchmark_path);
  const SimWorld world = BuildWorld(config, bench ? &*bench : nullptr);
  const fs::path out(out_dir);
  fs::create_directories(out);

  {
    std::ofstream f(out / "benchmark.jsonl");
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + (out / "benchmark.jsonl").string());
    WriteBenchmark(f, world.benchmark);
  }
  Json models = Json::array();
  for (const ModelEntry& m : world.models) models.push_back(ToJson(m));
  WriteFile(out / "models.json", models.dump(2) + "\n");
  SaveJsonl(out / "images.jsonl", world.images.images());
  SaveJsonl(out / "anchors.jsonl", world.anchors);
  SaveJsonl(out / "evaluators.jsonl", world.profiles);

  const std::vector<MatchRecord> matches = SimulateTournament(config, world);
  SaveJsonl(out / "matches.jsonl", matches);
  const std::vector<MosRecord> mos = SimulateMos(config, world);
  SaveJsonl(out / "mos.jsonl", mos);
  if (config.preference_matches > 0) {
    SaveJsonl(out / "preference_matches.jsonl", SimulatePreferenceMatches(config, world, mos));
  }
  WriteFile(out / "truth.json", PlantedTruthJson(config, world).dump(2) + "\n");
  const Json service{{"host", "127.0.0.1"},
                     {"port", 8080},
                     {"data_dir", "store"},
                     {"benchmark", "benchmark.jsonl"},
                     {"images", "images.jsonl"},
                     {"models", "models.json"},
                     {"anchors", "anchors.jsonl"},
                     {"scheduler", ToJson(config.scheduler)},
                     {"fit_cadence_s", 300},
                     {"bootstrap_rounds", 1000},
                     {"seed", config.seed}};
  WriteFile(out / "service.json", service.dump(2) + "\n");
  Print(Json{{"out", out.string()},
             {"baseline", world.baseline},
             {"matches", matches.size()},
             {"mos_records", mos.size()},
             {"images", world.images.size()},
             {"prompts", world.benchmark.size()}});
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"arena: pairwise and MOS evaluation toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");

  // fit
  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Bradley-Terry leaderboard on stdout");
  AddFitFlags(fit, &fit_args);

  // bootstrap
  FitArgs boot_args;
  auto* boot = app.add_subcommand("bootstrap", "leaderboard with bootstrap intervals");
  AddFitFlags(boot, &boot_args);
  boot->add_option("--B,-B", boot_args.rounds, "bootstrap rounds (>= 100)");
  boot->add_option("--seed", boot_args.seed, "RNG seed");

  // prompt-elo
  std::string pe_in, pe_baseline, pe_model, pe_mode, pe_evaluators;
  auto* pe = app.add_subcommand("prompt-elo", "per-prompt ELO contributions");
  pe->add_option("--in", pe_in, "match log")->required();
  pe->add_option("--baseline", pe_baseline, "baseline model id")->required();
  pe->add_option("--model", pe_model, "model id; all models when omitted");
  pe->add_option("--mode", pe_mode, "expert, public or all");
  pe->add_option("--evaluators", pe_evaluators, "profiles; flagged evaluators are dropped");

  // mos-report
  std::string mr_mos, mr_images, mr_bench, mr_models, mr_test_points;
  std::vector<std::string> mr_compare;
  auto* mr = app.add_subcommand("mos-report", "MOS means and variances per scope");
  mr->add_option("--mos", mr_mos, "MOS records")->required();
  mr->add_option("--images", mr_images, "image records")->required();
  mr->add_option("--benchmark", mr_bench, "benchmark")->required();
  mr->add_option("--models", mr_models, "models JSON; defaults to scored models");
  mr->add_option("--test-points", mr_test_points, "test-point results (JSON Lines)");
  mr->add_option("--compare", mr_compare, "two model ids to compare")->expected(2);

  // weights
  std::string w_matches, w_mos, w_images, w_bench, w_evaluators, w_strata = "none", w_mode;
  int64_t w_min_rows = 500;
  auto* w = app.add_subcommand("weights", "MOS-to-preference logistic fits");
  w->add_option("--matches", w_matches, "match log")->required();
  w->add_option("--mos", w_mos, "MOS records")->required();
  w->add_option("--images", w_images, "image records")->required();
  w->add_option("--strata", w_strata, "none, persona or scenario")
      ->check(CLI::IsMember({"none", "persona", "scenario"}));
  w->add_option("--benchmark", w_bench, "benchmark (scenario strata)");
  w->add_option("--evaluators", w_evaluators, "profiles (persona strata)");
  w->add_option("--mode", w_mode, "expert, public or all");
  w->add_option("--min-rows", w_min_rows, "smallest stratum fitted");

  // qc
  std::string qc_matches, qc_anchors, qc_evaluators, qc_options, qc_audit_out;
  double qc_audit_fraction = 0.0;
  uint64_t qc_seed = 0;
  auto* qc = app.add_subcommand("qc", "evaluator quality control report");
  qc->add_option("--matches", qc_matches, "match log")->required();
  qc->add_option("--anchors", qc_anchors, "anchor pairs");
  qc->add_option("--evaluators", qc_evaluators, "registered profiles");
  qc->add_option("--options", qc_options, "QC thresholds (JSON)");
  qc->add_option("--audit-fraction", qc_audit_fraction, "share of votes sampled for audit");
  qc->add_option("--audit-out", qc_audit_out, "audit sample output (JSON Lines)");
  qc->add_option("--seed", qc_seed, "audit RNG seed");

  // simulate
  std::string sim_config, sim_out = "sim_out", sim_bench;
  auto* sim = app.add_subcommand("simulate", "synthetic arena with planted truth");
  sim->add_option("--config", sim_config, "simulation config (JSON)")->required();
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--benchmark", sim_bench, "use these prompts instead of generated ones");

  // lint-benchmark
  std::string lint_path, lint_rules, lint_dist;
  double lint_tol = kDefaultDistributionTolerance;
  auto* lint = app.add_subcommand("lint-benchmark", "prompt rules and label distribution");
  lint->add_option("benchmark", lint_path, "benchmark JSON Lines")->required();
  lint->add_option("--rules", lint_rules, "lint rules (JSON)");
  lint->add_option("--distribution", lint_dist, "target label distribution (JSON)");
  lint->add_option("--tolerance", lint_tol, "absolute tolerance per label");

  // serve
  std::string serve_config;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--config", serve_config, "service config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("arena"));
  spdlog::set_level(verbose || serve->parsed() ? spdlog::level::info : spdlog::level::warn);

  if (fit->parsed()) {
    Print(LeaderboardJson(RunFit(fit_args, false).rows));
  } else if (boot->parsed()) {
    const Leaderboard board = RunFit(boot_args, true);
    Print(Json{{"B", boot_args.rounds},
               {"seed", boot_args.seed},
               {"rows", LeaderboardJson(board.rows)},
               {"eligibility", EligibilityJson(board)}});
  } else if (pe->parsed()) {
    const auto matches = LoadRatedMatches(pe_in, pe_evaluators);
    const MatchFilter filter = RatingFilter(pe_mode, "", std::nullopt);
    if (!pe_model.empty()) {
      Print(ToJson(PromptEloContributions(matches, pe_baseline, pe_model, {}, filter)));
    } else {
      Json out = Json::array();
      for (const auto& d : PromptEloContributionsAll(matches, pe_baseline, {}, filter)) {
        out.push_back(ToJson(d));
      }
      Print(out);
    }
  } else if (mr->parsed()) {
    const auto records = LoadMos(mr_mos);
    const ImageStore images(LoadImages(mr_images));
    const Benchmark bench = LoadBenchmarkFile(mr_bench);
    std::vector<ModelId> models;
    if (!mr_models.empty()) {
      for (const ModelEntry& m : LoadModels(mr_models)) models.push_back(m.model_id);
    } else {
      std::set<ModelId> seen;
      for (const MosRecord& r : records) {
        if (const GeneratedImage* g = images.Find(r.image_id)) seen.insert(g->model_id);
      }
      models.assign(seen.begin(), seen.end());
    }
    Json out = MosReport(records, images, bench, models);
    std::map<EvaluatorId, std::vector<MosRecord>> by_evaluator;
    for (const MosRecord& r : records) by_evaluator[r.evaluator_id].push_back(r);
    Json corr = Json::array();
    for (const auto& [id, recs] : by_evaluator) {
      if (recs.size() >= 3) {
        corr.push_back(CorrelationJson(id, InterdimCorrelation(recs), recs.size()));
      }
    }
    out["correlations"] = corr;
    if (!mr_compare.empty()) {
      Json cmp = Json::array();
      for (const MosScope& scope : AllMosScopes()) {
        for (Dimension d : kAllDimensions) {
          const MosSummary a = Summarize(records, images, bench, mr_compare[0], d, scope);
          const MosSummary b = Summarize(records, images, bench, mr_compare[1], d, scope);
          const ComparisonVerdict v = CompareModels(a, b);
          cmp.push_back({{"scope", scope.Name()},
                         {"dimension", DimensionName(d)},
                         {"model_a", mr_compare[0]},
                         {"model_b", mr_compare[1]},
                         {"delta", v.delta},
                         {"exceeds_threshold", v.exceeds_threshold},
                         {"z", v.z},
                         {"p_value", v.p_value},
                         {"significant", v.significant}});
        }
      }
      out["comparisons"] = cmp;
    }
    if (!mr_test_points.empty()) {
      std::ifstream in(mr_test_points);
      if (!in) throw Error(ErrorCode::kIo, "cannot open " + mr_test_points);
      const auto results = ReadJsonl<TestPointResult>(in, TestPointResultFromJson);
      out["test_points"] = TestPointScoresJson(TestPointScores(results, images));
    }
    Print(out);
  } else if (w->parsed()) {
    std::vector<MatchRecord> matches = LoadMatches(w_matches);
    std::map<EvaluatorId, Persona> personas;
    if (!w_evaluators.empty()) {
      const auto profiles = LoadEvaluators(w_evaluators);
      for (const EvaluatorProfile& p : profiles) personas[p.evaluator_id] = p.persona;
      matches = ApplyFlags(matches, profiles);
    }
    if (auto m = ParseModeFlag(w_mode)) {
      std::erase_if(matches, [&](const MatchRecord& r) { return r.mode != *m; });
    }
    const MosLookup lookup(LoadMos(w_mos), ImageStore(LoadImages(w_images)));
    std::optional<Benchmark> bench;
    if (!w_bench.empty()) bench = LoadBenchmarkFile(w_bench);
    StratifiedOptions opts;
    opts.strata = w_strata == "persona"    ? Strata::kPersona
                  : w_strata == "scenario" ? Strata::kScenario
                                           : Strata::kNone;
    opts.min_rows = w_min_rows;
    const auto reports =
        StratifiedReport(matches, lookup, opts, personas, bench ? &*bench : nullptr);
    Print(Json{{"strata", w_strata}, {"reports", WeightReportsJson(reports)}});
  } else if (qc->parsed()) {
    const auto matches = LoadMatches(qc_matches);
    std::vector<AnchorPair> anchors;
    if (!qc_anchors.empty()) anchors = LoadAnchors(qc_anchors);
    std::vector<EvaluatorProfile> known;
    if (!qc_evaluators.empty()) known = LoadEvaluators(qc_evaluators);
    QcOptions opts;
    if (!qc_options.empty()) {
      opts = QcOptionsFromJson(Json::parse(ReadFile(qc_options)));
    }
    Json out = ToJson(RunQc(matches, anchors, known, opts));
    if (qc_audit_fraction > 0.0) {
      const auto sample = SampleForAudit<MatchRecord>(matches, qc_audit_fraction, qc_seed);
      out["audit_size"] = sample.size();
      if (!qc_audit_out.empty()) SaveJsonl(qc_audit_out, sample);
    }
    Print(out);
  } else if (sim->parsed()) {
    return Simulate(sim_config, sim_out, sim_bench);
  } else if (lint->parsed()) {
    const Benchmark bench = LoadBenchmarkFile(lint_path);
    Json out;
    Json findings = Json::array();
    if (!lint_rules.empty()) {
      for (const LintFinding& f : LintBenchmark(bench, LoadLintRules(lint_rules))) {
        findings.push_back(ToJson(f));
      }
    }
    out["findings"] = findings;
    DistributionSpec targets = bench.distribution_spec();
    if (!lint_dist.empty()) targets = DistributionSpecFromJson(Json::parse(ReadFile(lint_dist)));
    out["distribution"] = ToJson(ValidateLabelDistribution(bench, targets, lint_tol));
    Print(out);
  } else if (serve->parsed()) {
    Service service(LoadServiceConfig(serve_config));
    return service.Listen() ? kExitOk : kExitIo;
  }
  return kExitOk;
}

}  // namespace
}  // namespace arena

int main(int argc, char** argv) {
  try {
    return arena::Main(argc, argv);
  } catch (const arena::Error& e) {
    std::cerr << "arena: " << arena::ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return e.code() == arena::ErrorCode::kIo ? arena::kExitIo : arena::kExitValidation;
  } catch (const nlohmann::ordered_json::exception& e) {
    std::cerr << "arena: invalid JSON: " << e.what() << '\n';
    return arena::kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "arena: " << e.what() << '\n';
    return arena::kExitIo;
  }
}
