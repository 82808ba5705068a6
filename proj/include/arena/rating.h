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

// Bradley-Terry rating of models from pairwise match outcomes.
//
// Under the Bradley-Terry model, model a beats model b with probability
// sigmoid(xi_a - xi_b). We maximize
//
//   sum_{a != b} w_ab * log sigmoid(xi_a - xi_b)  -  reg * ||xi - mean(xi)||^2
//
// where w_ab = W[a][b] + 0.5 * T[a][b]: a tie contributes one half-weight
// observation in each direction, the same convention as the displayed win
// rate (W + 0.5 T) / N. The baseline coefficient is pinned at zero and ELO
// is the affine map 1000 + (400 / ln 10) * (xi - xi_baseline). The penalty
// is shift invariant, so ELO differences do not depend on which model is the
// baseline.

#ifndef ARENA_RATING_H_
#define ARENA_RATING_H_

#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "arena/types.h"

namespace arena {

class Benchmark;

inline constexpr double kBaselineElo = 1000.0;
inline constexpr double kEloScale = 400.0 / std::numbers::ln10;

struct OutcomeTable {
  std::vector<ModelId> models;  // sorted ascending
  Eigen::MatrixXd wins;         // wins(a, b): a beat b
  Eigen::MatrixXd ties;         // symmetric, zero diagonal

  // -1 when absent.
  int Index(const ModelId& id) const;
  int size() const { return static_cast<int>(models.size()); }
  // N_A = wins + ties + losses involving model index a.
  double Played(int a) const;
  Eigen::MatrixXd DirectedWeights() const { return wins + 0.5 * ties; }
};

using MatchFilter = std::function<bool(const MatchRecord&)>;

MatchFilter ExcludeAnchors();
MatchFilter InMode(Mode mode);
// Keeps matches whose prompt carries `scenario`; unknown prompts are dropped.
MatchFilter InScenario(const Benchmark& benchmark, Scenario scenario);
MatchFilter ExcludeEvaluators(std::set<EvaluatorId> evaluators);
MatchFilter AllOf(std::vector<MatchFilter> filters);

// Counts matches accepted by `filter` (all when empty). `models` optionally
// seeds the model list so that models without matches still get a row.
OutcomeTable BuildOutcomeTable(std::span<const MatchRecord> matches,
                               const MatchFilter& filter = {},
                               std::span<const ModelId> models = {});

// (W_A + 0.5 T_A) / N_A. Throws kUndefined when N_A == 0, kNotFound when
// the model is absent.
double WinRate(const OutcomeTable& table, const ModelId& model);

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double width() const { return high - low; }
};

struct FitOptions {
  double reg = 1e-4;
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
};

struct BtFit {
  std::vector<ModelId> models;
  ModelId baseline;
  std::vector<double> coefficients;  // xi, baseline pinned at 0
  std::vector<double> elo;
  std::vector<std::optional<Interval>> ci95;  // filled by bootstrap
  std::vector<double> n_matches;
  std::vector<double> win_rate;
  int iterations = 0;
  double max_gradient = 0.0;

  int Index(const ModelId& id) const;
  // Throws kNotFound.
  double Elo(const ModelId& id) const;
  double Coefficient(const ModelId& id) const;
};

// Throws kNotFound for an unknown baseline, kConnectivity when the
// comparison graph is disconnected (message lists the components) and
// kNonConvergence under perfect separation with reg == 0.
BtFit FitBt(const OutcomeTable& table, const ModelId& baseline,
            const FitOptions& options = {});

// Same optimization over explicit directed observation weights
// (weights(a, b) = mass of "a beat b" observations).
BtFit FitBtWeighted(std::span<const ModelId> models,
                    const Eigen::MatrixXd& weights, const ModelId& baseline,
                    const FitOptions& options = {});

// Gradient of the penalized log-likelihood at xi (all coordinates,
// including the baseline's).
Eigen::VectorXd BtGradient(const Eigen::MatrixXd& weights,
                           const Eigen::VectorXd& xi, double reg);
double BtLogLikelihood(const Eigen::MatrixXd& weights, const Eigen::VectorXd& xi,
                       double reg);

double ToElo(double xi, double xi_baseline);
std::vector<double> ToElo(std::span<const double> xi, int baseline_index);

}  // namespace arena

#endif  // ARENA_RATING_H_
