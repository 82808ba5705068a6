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

#include "arena/rating.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "Eigen/Cholesky"
#include "arena/benchmark.h"
#include "arena/error.h"
#include "arena/stats.h"

namespace arena {

int OutcomeTable::Index(const ModelId& id) const {
  auto it = std::lower_bound(models.begin(), models.end(), id);
  if (it == models.end() || *it != id) return -1;
  return static_cast<int>(it - models.begin());
}

double OutcomeTable::Played(int a) const {
  return wins.row(a).sum() + wins.col(a).sum() + ties.row(a).sum();
}

MatchFilter ExcludeAnchors() {
  return [](const MatchRecord& m) { return !m.is_anchor; };
}

MatchFilter InMode(Mode mode) {
  return [mode](const MatchRecord& m) { return m.mode == mode; };
}

MatchFilter InScenario(const Benchmark& benchmark, Scenario scenario) {
  std::set<PromptId> prompts;
  for (const PromptItem& p : benchmark.prompts()) {
    if (p.scenario_label == scenario) prompts.insert(p.prompt_id);
  }
  return [prompts = std::move(prompts)](const MatchRecord& m) {
    return prompts.contains(m.prompt_id);
  };
}

MatchFilter ExcludeEvaluators(std::set<EvaluatorId> evaluators) {
  return [evaluators = std::move(evaluators)](const MatchRecord& m) {
    return !evaluators.contains(m.evaluator_id);
  };
}

MatchFilter AllOf(std::vector<MatchFilter> filters) {
  return [filters = std::move(filters)](const MatchRecord& m) {
    for (const MatchFilter& f : filters) {
      if (f && !f(m)) return false;
    }
    return true;
  };
}

OutcomeTable BuildOutcomeTable(std::span<const MatchRecord> matches,
                               const MatchFilter& filter,
                               std::span<const ModelId> models) {
  std::set<ModelId> ids(models.begin(), models.end());
  for (const MatchRecord& m : matches) {
    if (filter && !filter(m)) continue;
    ids.insert(m.model_left);
    ids.insert(m.model_right);
  }
  OutcomeTable table;
  table.models.assign(ids.begin(), ids.end());
  const int n = table.size();
  table.wins = Eigen::MatrixXd::Zero(n, n);
  table.ties = Eigen::MatrixXd::Zero(n, n);
  for (const MatchRecord& m : matches) {
    if (filter && !filter(m)) continue;
    const int l = table.Index(m.model_left);
    const int r = table.Index(m.model_right);
    if (l == r) continue;
    switch (m.outcome) {
      case Outcome::kLeftWins:
        table.wins(l, r) += 1;
        break;
      case Outcome::kRightWins:
        table.wins(r, l) += 1;
        break;
      case Outcome::kBothGood:
      case Outcome::kBothBad:
        table.ties(l, r) += 1;
        table.ties(r, l) += 1;
        break;
    }
  }
  return table;
}

double WinRate(const OutcomeTable& table, const ModelId& model) {
  const int a = table.Index(model);
  if (a < 0) throw Error(ErrorCode::kNotFound, "model not in table: " + model);
  const double n = table.Played(a);
  if (n <= 0) {
    throw Error(ErrorCode::kUndefined, "win rate undefined: " + model + " has no matches");
  }
  return (table.wins.row(a).sum() + 0.5 * table.ties.row(a).sum()) / n;
}

int BtFit::Index(const ModelId& id) const {
  for (size_t i = 0; i < models.size(); ++i) {
    if (models[i] == id) return static_cast<int>(i);
  }
  return -1;
}

double BtFit::Elo(const ModelId& id) const {
  const int i = Index(id);
  if (i < 0) throw Error(ErrorCode::kNotFound, "model not in fit: " + id);
  return elo[i];
}

double BtFit::Coefficient(const ModelId& id) const {
  const int i = Index(id);
  if (i < 0) throw Error(ErrorCode::kNotFound, "model not in fit: " + id);
  return coefficients[i];
}

double ToElo(double xi, double xi_baseline) {
  return kBaselineElo + kEloScale * (xi - xi_baseline);
}

std::vector<double> ToElo(std::span<const double> xi, int baseline_index) {
  std::vector<double> out(xi.size());
  for (size_t i = 0; i < xi.size(); ++i) out[i] = ToElo(xi[i], xi[baseline_index]);
  return out;
}

Eigen::VectorXd BtGradient(const Eigen::MatrixXd& weights,
                           const Eigen::VectorXd& xi, double reg) {
  const int n = static_cast<int>(xi.size());
  Eigen::VectorXd g = -2.0 * reg * (xi.array() - xi.mean()).matrix();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double total = weights(a, b) + weights(b, a);
      if (total == 0.0) continue;
      // d/dxi_a of the (a, b) terms; antisymmetric in (a, b).
      const double r = weights(a, b) - total * Sigmoid(xi[a] - xi[b]);
      g[a] += r;
      g[b] -= r;
    }
  }
  return g;
}

double BtLogLikelihood(const Eigen::MatrixXd& weights, const Eigen::VectorXd& xi,
                       double reg) {
  const int n = static_cast<int>(xi.size());
  double ll = -reg * (xi.array() - xi.mean()).square().sum();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b && weights(a, b) != 0.0) {
        ll += weights(a, b) * LogSigmoid(xi[a] - xi[b]);
      }
    }
  }
  return ll;
}

namespace {

// Connected components of the undirected comparison graph.
std::vector<std::vector<int>> Components(const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::vector<int> comp{s};
    label[s] = static_cast<int>(out.size());
    for (size_t k = 0; k < comp.size(); ++k) {
      const int a = comp[k];
      for (int b = 0; b < n; ++b) {
        if (label[b] < 0 && weights(a, b) + weights(b, a) > 0) {
          label[b] = label[s];
          comp.push_back(b);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

// Every model reachable from every other along "beat" edges; without this the
// unpenalized likelihood has no finite maximizer.
bool StronglyConnected(const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  auto reach_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        const double w = forward ? weights(a, b) : weights(b, a);
        if (!seen[b] && w > 0) {
          seen[b] = true;
          ++count;
          stack.push_back(b);
        }
      }
    }
    return count == n;
  };
  return n <= 1 || (reach_all(true) && reach_all(false));
}

}  // namespace

BtFit FitBtWeighted(std::span<const ModelId> models, const Eigen::MatrixXd& weights,
                    const ModelId& baseline, const FitOptions& options) {
  const int n = static_cast<int>(models.size());
  int base = -1;
  for (int i = 0; i < n; ++i) {
    if (models[i] == baseline) base = i;
  }
  if (base < 0) throw Error(ErrorCode::kNotFound, "baseline not in table: " + baseline);
  if (options.reg < 0) throw Error(ErrorCode::kInvalidArgument, "reg must be >= 0");

  const std::vector<std::vector<int>> comps = Components(weights);
  if (comps.size() > 1) {
    std::string msg = "comparison graph is disconnected; components:";
    for (const auto& comp : comps) {
      msg += " {";
      for (size_t k = 0; k < comp.size(); ++k) {
        if (k) msg += ", ";
        msg += models[comp[k]];
      }
      msg += "}";
    }
    throw Error(ErrorCode::kConnectivity, msg);
  }
  if (options.reg == 0.0 && !StronglyConnected(weights)) {
    throw Error(ErrorCode::kNonConvergence,
                "perfect separation: some models never lose (or never win) "
                "against the rest; the unpenalized MLE does not exist, use reg > 0");
  }

  // Free coordinates exclude the baseline.
  std::vector<int> free;
  for (int i = 0; i < n; ++i) {
    if (i != base) free.push_back(i);
  }
  const int m = static_cast<int>(free.size());

  Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
  double ll = BtLogLikelihood(weights, xi, options.reg);
  int iter = 0;
  double max_grad = 0.0;
  for (;; ++iter) {
    const Eigen::VectorXd g = BtGradient(weights, xi, options.reg);
    max_grad = 0.0;
    for (int k : free) max_grad = std::max(max_grad, std::abs(g[k]));
    if (max_grad < options.gradient_tolerance || m == 0) break;
    if (iter >= options.max_iterations) {
      throw Error(ErrorCode::kNonConvergence,
                  "Bradley-Terry fit did not converge in " +
                      std::to_string(options.max_iterations) +
                      " iterations (max gradient " + std::to_string(max_grad) +
                      "); consider reg > 0");
    }
    // Negative Hessian restricted to the free coordinates.
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(m, m);
    // Centered penalty: 2 reg (I - 11'/n) on the free block.
    info.setConstant(-2.0 * options.reg / n);
    for (int i = 0; i < m; ++i) info(i, i) += 2.0 * options.reg;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < m; ++i) slot[free[i]] = i;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const double total = weights(a, b) + weights(b, a);
        if (total == 0.0) continue;
        const double p = Sigmoid(xi[a] - xi[b]);
        const double h = total * p * (1.0 - p);
        const int sa = slot[a], sb = slot[b];
        if (sa >= 0) info(sa, sa) += h;
        if (sb >= 0) info(sb, sb) += h;
        if (sa >= 0 && sb >= 0) {
          info(sa, sb) -= h;
          info(sb, sa) -= h;
        }
      }
    }
    Eigen::VectorXd gf(m);
    for (int i = 0; i < m; ++i) gf[i] = g[free[i]];
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::VectorXd step = ldlt.solve(gf);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) step = gf;

    // Backtracking keeps every accepted step an ascent step.
    double t = 1.0;
    Eigen::VectorXd candidate = xi;
    double candidate_ll = ll;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      candidate = xi;
      for (int i = 0; i < m; ++i) candidate[free[i]] += t * step[i];
      candidate_ll = BtLogLikelihood(weights, candidate, options.reg);
      if (candidate_ll >= ll - 1e-12 * std::abs(ll)) break;
    }
    xi = candidate;
    ll = candidate_ll;
  }

  BtFit fit;
  fit.models.assign(models.begin(), models.end());
  fit.baseline = baseline;
  fit.coefficients.assign(xi.data(), xi.data() + n);
  fit.elo = ToElo(fit.coefficients, base);
  fit.elo[base] = kBaselineElo;
  fit.ci95.assign(n, std::nullopt);
  fit.n_matches.resize(n);
  fit.win_rate.resize(n);
  for (int a = 0; a < n; ++a) {
    const double played = weights.row(a).sum() + weights.col(a).sum();
    fit.n_matches[a] = played;
    fit.win_rate[a] = played > 0 ? weights.row(a).sum() / played : 0.0;
  }
  fit.iterations = iter;
  fit.max_gradient = max_grad;
  return fit;
}

BtFit FitBt(const OutcomeTable& table, const ModelId& baseline,
            const FitOptions& options) {
  return FitBtWeighted(table.models, table.DirectedWeights(), baseline, options);
}

}  // namespace arena
