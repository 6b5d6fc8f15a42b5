// Copyright 2026 The exmts Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "exmts/error.hpp"
#include "exmts/features.hpp"

namespace exmts {

/// Column standardization fitted on training features.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  ///< population sd, 1 for constant columns

  friend bool operator==(const FeatureScaler& a, const FeatureScaler& b) {
    return a.mean.size() == b.mean.size() && a.mean == b.mean && a.scale == b.scale;
  }
};

inline FeatureScaler fit_scaler(const FeatureMatrix& X) {
  if (X.rows() < 2) fail(ErrorKind::TooFewSamples, "scaler needs at least 2 samples");
  const Eigen::Index n = X.rows(), f = X.cols();
  FeatureScaler s{Eigen::VectorXd(f), Eigen::VectorXd(f)};
  for (Eigen::Index j = 0; j < f; ++j) {
    const auto col = X.col(j);
    const double lo = col.minCoeff(), hi = col.maxCoeff();
    if (lo == hi) {
      s.mean(j) = lo;
      s.scale(j) = 1.0;
      continue;
    }
    const double mean = col.sum() / static_cast<double>(n);
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n);
    s.mean(j) = mean;
    s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

inline FeatureMatrix apply_scaler(const FeatureScaler& s, const FeatureMatrix& X) {
  if (X.cols() != s.mean.size())
    fail(ErrorKind::ShapeMismatch, "feature count " + std::to_string(X.cols()) +
                                       " does not match scaler " + std::to_string(s.mean.size()));
  FeatureMatrix out = X;
  out.rowwise() -= s.mean.transpose();
  out.array().rowwise() /= s.scale.transpose().array();
  return out;
}

/// Ten log-spaced values in [1e-3, 1e3].
inline std::vector<double> default_alpha_grid() {
  std::vector<double> a;
  for (int i = 0; i < 10; ++i) a.push_back(std::pow(10.0, -3.0 + 6.0 * i / 9.0));
  return a;
}

/// One-vs-rest ridge classifier on +-1 targets with an unpenalized intercept.
struct RidgeModel {
  std::vector<int> classes;      ///< column k of the scores is label classes[k]
  std::vector<double> alphas;    ///< grid searched
  std::vector<double> loo_errors;  ///< mean squared LOO residual per alpha
  double alpha = 1.0;            ///< selected
  Eigen::MatrixXd weights;       ///< F x K
  Eigen::VectorXd intercept;     ///< K

  friend bool operator==(const RidgeModel& a, const RidgeModel& b) {
    return a.classes == b.classes && a.alphas == b.alphas && a.loo_errors == b.loo_errors &&
           a.alpha == b.alpha && a.weights.rows() == b.weights.rows() &&
           a.weights.cols() == b.weights.cols() && a.weights == b.weights &&
           a.intercept == b.intercept;
  }
};

namespace detail {

/// Thin decomposition of the centred design: left singular vectors U,
/// squared singular values, and right singular vectors when available.
struct CenteredDecomposition {
  Eigen::MatrixXd U;
  Eigen::VectorXd s2;
  Eigen::MatrixXd V;  ///< empty for the Gram route
};

inline CenteredDecomposition decompose_centered(const Eigen::MatrixXd& Xc) {
  CenteredDecomposition d;
  const Eigen::Index n = Xc.rows(), f = Xc.cols();
  if (n <= f) {
    // Wide: eigenvectors of the N x N Gram matrix are the left singular vectors.
    const Eigen::MatrixXd gram = Xc * Xc.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "eigendecomposition failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double tol = std::max(lambda.maxCoeff(), 0.0) * static_cast<double>(n) * 1e-13;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < n; ++k)
      if (lambda(k) > tol) keep.push_back(k);
    d.U.resize(n, static_cast<Eigen::Index>(keep.size()));
    d.s2.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      d.U.col(static_cast<Eigen::Index>(i)) = eig.eigenvectors().col(keep[i]);
      d.s2(static_cast<Eigen::Index>(i)) = lambda(keep[i]);
    }
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "SVD did not converge");
    const Eigen::VectorXd& s = svd.singularValues();
    const double tol = (s.size() ? s(0) : 0.0) * static_cast<double>(std::max(n, f)) * 1e-15;
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tol) ++r;
    d.U = svd.matrixU().leftCols(r);
    d.V = svd.matrixV().leftCols(r);
    d.s2 = s.head(r).array().square();
  }
  return d;
}

}  // namespace detail

namespace detail {

/// Closed-form leave-one-out residuals for ridge with an unpenalized
/// intercept. With P the centring projector and H the hat matrix,
///   I - H = (P - U U^T) + U diag(alpha / (s2 + alpha)) U^T,
/// and the LOO residual of sample i is [(I - H) y]_i / (I - H)_ii.
class LooSolver {
 public:
  LooSolver(const Eigen::MatrixXd& Xc, const Eigen::MatrixXd& Yc)
      : dec_(decompose_centered(Xc)), UtY_(dec_.U.transpose() * Yc), U2_(dec_.U.array().square().matrix()) {
    const Eigen::Index n = Xc.rows();
    base_resid_ = Yc - dec_.U * UtY_;
    base_diag_ = Eigen::VectorXd::Constant(n, 1.0 - 1.0 / static_cast<double>(n)) -
                 U2_.rowwise().sum();
  }

  Eigen::MatrixXd residuals(double alpha) const {
    const Eigen::VectorXd shrink = (alpha / (dec_.s2.array() + alpha)).matrix();
    const Eigen::MatrixXd resid = base_resid_ + dec_.U * (shrink.asDiagonal() * UtY_);
    const Eigen::VectorXd diag = base_diag_ + U2_ * shrink;
    return resid.array().colwise() / diag.array();
  }

  /// Ridge weights on the centred problem.
  Eigen::MatrixXd weights(const Eigen::MatrixXd& Xc, double alpha) const {
    const Eigen::VectorXd inv = (1.0 / (dec_.s2.array() + alpha)).matrix();
    if (dec_.V.size() > 0) {
      const Eigen::VectorXd s = dec_.s2.array().sqrt().matrix();
      return dec_.V * (s.cwiseProduct(inv).asDiagonal() * UtY_);
    }
    return Xc.transpose() * (dec_.U * (inv.asDiagonal() * UtY_));
  }

 private:
  CenteredDecomposition dec_;
  Eigen::MatrixXd UtY_;
  Eigen::MatrixXd U2_;
  Eigen::MatrixXd base_resid_;
  Eigen::VectorXd base_diag_;
};

}  // namespace detail

/// Leave-one-out residuals (N x K) of a ridge fit with intercept for every
/// alpha, from a single decomposition of the centred design.
inline std::vector<Eigen::MatrixXd> ridge_loo_residuals(const FeatureMatrix& X, const Eigen::MatrixXd& Y,
                                                        const std::vector<double>& alphas) {
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd Yc = Y.rowwise() - Y.colwise().mean();
  const detail::LooSolver solver(Xc, Yc);
  std::vector<Eigen::MatrixXd> out;
  for (double alpha : alphas) out.push_back(solver.residuals(alpha));
  return out;
}

/// Fits weights for every class column at the alpha with the lowest mean
/// squared leave-one-out residual (first on ties).
inline RidgeModel ridge_fit(const FeatureMatrix& X, const std::vector<int>& labels,
                            std::vector<double> alphas = default_alpha_grid()) {
  if (static_cast<std::size_t>(X.rows()) != labels.size())
    fail(ErrorKind::LengthMismatch, "feature rows and labels differ in count");
  if (alphas.empty()) fail(ErrorKind::InvalidParams, "empty alpha grid");
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorKind::InvalidParams, "alphas must be positive");
  RidgeModel m;
  m.classes = labels;
  std::sort(m.classes.begin(), m.classes.end());
  m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
  if (m.classes.size() < 2) fail(ErrorKind::DegenerateLabels, "ridge classifier needs >= 2 classes");
  if (!X.allFinite()) fail(ErrorKind::NumericalFailure, "non-finite features");

  const Eigen::Index n = X.rows(), K = static_cast<Eigen::Index>(m.classes.size());
  Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(n, K, -1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = std::lower_bound(m.classes.begin(), m.classes.end(), labels[static_cast<std::size_t>(i)]) -
                   m.classes.begin();
    Y(i, k) = 1.0;
  }

  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const Eigen::RowVectorXd y_mean = Y.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::MatrixXd Yc = Y.rowwise() - y_mean;
  const detail::LooSolver solver(Xc, Yc);

  m.alphas = alphas;
  double best = std::numeric_limits<double>::infinity();
  for (double alpha : alphas) {
    const double err = solver.residuals(alpha).array().square().mean();
    if (!std::isfinite(err)) fail(ErrorKind::NumericalFailure, "non-finite LOO error");
    m.loo_errors.push_back(err);
    if (err < best) {
      best = err;
      m.alpha = alpha;
    }
  }
  m.weights = solver.weights(Xc, m.alpha);
  m.intercept = (y_mean - x_mean * m.weights).transpose();
  if (!m.weights.allFinite() || !m.intercept.allFinite())
    fail(ErrorKind::NumericalFailure, "non-finite ridge weights");
  return m;
}

inline Eigen::MatrixXd predict_scores(const RidgeModel& m, const FeatureMatrix& X) {
  if (X.cols() != m.weights.rows())
    fail(ErrorKind::ShapeMismatch, "feature count " + std::to_string(X.cols()) +
                                       " does not match model " + std::to_string(m.weights.rows()));
  Eigen::MatrixXd scores = X * m.weights;
  scores.rowwise() += m.intercept.transpose();
  return scores;
}

/// Column of the largest score; ties go to the lowest column.
inline std::size_t argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::size_t best = 0;
  for (Eigen::Index k = 1; k < row.size(); ++k)
    if (row(k) > row(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(k);
  return best;
}

inline std::vector<int> predict_from_scores(const RidgeModel& m, const Eigen::MatrixXd& scores) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) labels.push_back(m.classes[argmax_row(scores.row(i))]);
  return labels;
}

inline std::vector<int> predict(const RidgeModel& m, const FeatureMatrix& X) {
  return predict_from_scores(m, predict_scores(m, X));
}

}  // namespace exmts
