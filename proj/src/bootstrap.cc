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

#include "arena/bootstrap.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "arena/error.h"
#include "arena/stats.h"

namespace arena {
namespace {

struct Cell {
  int winner;  // for ties: the lower index
  int loser;
  bool tie;
  int64_t count;
};

std::vector<Cell> CellsOf(const OutcomeTable& table) {
  std::vector<Cell> cells;
  const int n = table.size();
  auto as_count = [](double v) {
    if (v != std::floor(v) || v < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bootstrap requires integral match counts");
    }
    return static_cast<int64_t>(v);
  };
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (int64_t c = as_count(table.wins(a, b))) cells.push_back({a, b, false, c});
      if (int64_t c = as_count(table.wins(b, a))) cells.push_back({b, a, false, c});
      if (int64_t c = as_count(table.ties(a, b))) cells.push_back({a, b, true, c});
    }
  }
  return cells;
}

Eigen::MatrixXd DrawResample(const std::vector<Cell>& cells, int64_t total, int n,
                             std::mt19937_64& rng) {
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n, n);
  int64_t trials = total;
  int64_t remaining_mass = total;
  for (const Cell& c : cells) {
    if (trials == 0) break;
    int64_t k = trials;
    if (c.count < remaining_mass) {
      std::binomial_distribution<int64_t> binom(
          trials, static_cast<double>(c.count) / static_cast<double>(remaining_mass));
      k = binom(rng);
    }
    trials -= k;
    remaining_mass -= c.count;
    if (c.tie) {
      weights(c.winner, c.loser) += 0.5 * static_cast<double>(k);
      weights(c.loser, c.winner) += 0.5 * static_cast<double>(k);
    } else {
      weights(c.winner, c.loser) += static_cast<double>(k);
    }
  }
  return weights;
}

}  // namespace

BootstrapResult BootstrapTable(const OutcomeTable& table, const ModelId& baseline,
                               const BootstrapOptions& options) {
  if (options.rounds < 100) {
    throw Error(ErrorCode::kInvalidArgument, "bootstrap needs at least 100 resamples");
  }
  const int base = table.Index(baseline);
  if (base < 0) throw Error(ErrorCode::kNotFound, "baseline not in table: " + baseline);
  const std::vector<Cell> cells = CellsOf(table);
  int64_t total = 0;
  for (const Cell& c : cells) total += c.count;
  const int n = table.size();

  BootstrapResult result;
  result.models = table.models;
  result.elo_samples.assign(options.rounds, std::vector<double>(n, 0.0));

  auto run_round = [&](int r) {
    for (int attempt = 0;; ++attempt) {
      std::mt19937_64 rng(DeriveSeed(
          options.seed, static_cast<uint64_t>(r) * (options.max_redraws + 1) + attempt));
      const Eigen::MatrixXd weights = DrawResample(cells, total, n, rng);
      try {
        result.elo_samples[r] = FitBtWeighted(table.models, weights, baseline, options.fit).elo;
        return;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kConnectivity || attempt >= options.max_redraws) {
          throw Error(e.code(), "bootstrap resample " + std::to_string(r) + ": " + e.what());
        }
      }
    }
  };

  const int threads = std::clamp(options.num_threads, 1, options.rounds);
  if (threads == 1) {
    for (int r = 0; r < options.rounds; ++r) run_round(r);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> workers;
      for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
          try {
            for (int r = t; r < options.rounds; r += threads) run_round(r);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const double tail = (1.0 - options.confidence) / 2.0;
  for (int i = 0; i < n; ++i) {
    if (i == base) continue;
    std::vector<double> column(options.rounds);
    for (int r = 0; r < options.rounds; ++r) column[r] = result.elo_samples[r][i];
    result.ci[table.models[i]] = {Percentile(column, tail), Percentile(column, 1.0 - tail)};
  }
  return result;
}

std::map<ModelId, Interval> BootstrapCi(std::span<const MatchRecord> matches,
                                        const ModelId& baseline,
                                        const BootstrapOptions& options,
                                        const MatchFilter& filter) {
  return BootstrapTable(BuildOutcomeTable(matches, filter), baseline, options).ci;
}

}  // namespace arena
