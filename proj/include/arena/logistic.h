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

// Weighted ridge logistic regression without intercept, fit by Newton's
// method.

#ifndef ARENA_LOGISTIC_H_
#define ARENA_LOGISTIC_H_

#include <string>
#include <vector>

#include "Eigen/Core"

namespace arena {

struct LogisticOptions {
  double reg = 1e-6;
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
};

struct LogisticFit {
  std::vector<std::string> feature_names;
  // Full length; dropped features have beta 0 and a NaN standard error.
  Eigen::VectorXd beta;
  // From the observed information X' diag(w p (1 - p)) X, without the
  // ridge term.
  Eigen::VectorXd std_errors;
  std::vector<std::string> dropped;
  int iterations = 0;
  double max_gradient = 0.0;
  double log_likelihood = 0.0;  // unpenalized
  bool converged = false;
};

// Weighted Bernoulli log-likelihood with logit link.
double LogisticLogLikelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& w, const Eigen::VectorXd& beta);

// Gradient of the log-likelihood minus reg * ||beta||^2.
Eigen::VectorXd LogisticGradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                                 double reg);

// Maximizes the penalized log-likelihood. Columns that are zero on every
// row are dropped with a warning. Throws kInvalidArgument on shape errors,
// non-positive weights or no rows, and kNonConvergence when reg == 0 and
// the data are separable (coefficients diverge).
LogisticFit FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, std::vector<std::string> feature_names,
                        const LogisticOptions& options = {});

}  // namespace arena

#endif  // ARENA_LOGISTIC_H_
