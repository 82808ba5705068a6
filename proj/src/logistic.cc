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

#include "arena/logistic.h"

#include <cmath>
#include <limits>

#include "Eigen/Cholesky"
#include "Eigen/LU"
#include "arena/error.h"
#include "arena/stats.h"
#include "spdlog/spdlog.h"

namespace arena {
namespace {

// Coefficients this large on standardized features only arise when the
// likelihood has no finite maximizer.
constexpr double kDivergedCoefficient = 20.0;
constexpr double kSeparationMargin = 10.0;

double Penalized(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                 const Eigen::VectorXd& beta, double reg) {
  return LogisticLogLikelihood(x, y, w, beta) - reg * beta.squaredNorm();
}

}  // namespace

double LogisticLogLikelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& w, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += w(i) * (y(i) * LogSigmoid(eta(i)) + (1.0 - y(i)) * LogSigmoid(-eta(i)));
  }
  return ll;
}

Eigen::VectorXd LogisticGradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                                 double reg) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = w(i) * (y(i) - Sigmoid(eta(i)));
  return x.transpose() * r - 2.0 * reg * beta;
}

LogisticFit FitLogistic(const Eigen::MatrixXd& x_full, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, std::vector<std::string> feature_names,
                        const LogisticOptions& options) {
  const Eigen::Index n = x_full.rows(), p_full = x_full.cols();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "logistic regression: no rows");
  if (y.size() != n || w.size() != n ||
      static_cast<Eigen::Index>(feature_names.size()) != p_full) {
    throw Error(ErrorCode::kInvalidArgument, "logistic regression: shape mismatch");
  }
  if ((w.array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "logistic regression: weights must be > 0");
  }
  if (!x_full.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "logistic regression: non-finite features");
  }

  LogisticFit fit;
  fit.feature_names = feature_names;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < p_full; ++j) {
    if ((x_full.col(j).array() != 0.0).any()) {
      kept.push_back(j);
    } else {
      fit.dropped.push_back(feature_names[j]);
      spdlog::warn("dropping constant-zero feature {}", feature_names[j]);
    }
  }
  const Eigen::Index p = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index k = 0; k < p; ++k) x.col(k) = x_full.col(kept[k]);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  const double reg = options.reg;
  double value = Penalized(x, y, w, beta, reg);
  Eigen::VectorXd grad = LogisticGradient(x, y, w, beta, reg);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (p == 0 || grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd curv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = Sigmoid(eta(i));
      curv(i) = w(i) * s * (1.0 - s);
    }
    Eigen::MatrixXd info = x.transpose() * curv.asDiagonal() * x;
    info.diagonal().array() += 2.0 * reg;
    Eigen::VectorXd step = info.ldlt().solve(grad);
    if (!step.allFinite()) step = grad;  // singular information: gradient step
    // The slack absorbs summation noise once steps become tiny.
    double t = 1.0;
    bool improved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const Eigen::VectorXd candidate = beta + t * step;
      const double v = Penalized(x, y, w, candidate, reg);
      if (v >= value - 1e-12 * std::abs(value)) {
        beta = candidate;
        value = v;
        improved = true;
        break;
      }
    }
    grad = LogisticGradient(x, y, w, beta, reg);
    if (!improved) break;
    if (reg == 0.0 && beta.lpNorm<Eigen::Infinity>() > kDivergedCoefficient) break;
  }
  fit.iterations = it;
  fit.max_gradient = p == 0 ? 0.0 : grad.lpNorm<Eigen::Infinity>();
  fit.converged = fit.max_gradient < options.gradient_tolerance;
  // Every row fitted with near certainty also means the unpenalized optimum
  // lies at infinity; the gradient just vanishes before beta gets large.
  bool separated = false;
  if (reg == 0.0 && p > 0) {
    const Eigen::ArrayXd margin = (2.0 * y.array() - 1.0) * (x * beta).array();
    separated = margin.minCoeff() > kSeparationMargin;
  }
  if (reg == 0.0 && p > 0 &&
      (separated || beta.lpNorm<Eigen::Infinity>() > kDivergedCoefficient)) {
    throw Error(ErrorCode::kNonConvergence,
                "logistic regression diverges (separable data); use reg > 0");
  }
  if (!fit.converged) {
    spdlog::warn("logistic regression stopped after {} iterations, max gradient {:.3g}", it,
                 fit.max_gradient);
  }

  fit.beta = Eigen::VectorXd::Zero(p_full);
  fit.std_errors = Eigen::VectorXd::Constant(p_full, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index k = 0; k < p; ++k) fit.beta(kept[k]) = beta(k);
  if (p > 0) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd curv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = Sigmoid(eta(i));
      curv(i) = w(i) * s * (1.0 - s);
    }
    const Eigen::MatrixXd info = x.transpose() * curv.asDiagonal() * x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    if (lu.isInvertible()) {
      const Eigen::MatrixXd cov = lu.inverse();
      for (Eigen::Index k = 0; k < p; ++k) fit.std_errors(kept[k]) = std::sqrt(cov(k, k));
    }
  }
  fit.log_likelihood = LogisticLogLikelihood(x, y, w, beta);
  return fit;
}

}  // namespace arena
