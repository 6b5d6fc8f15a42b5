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

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "exmts/eval.hpp"
#include "exmts/linear_clf.hpp"
#include "oracles.hpp"

namespace exmts {
namespace {

FeatureMatrix random_matrix(Rng& rng, Eigen::Index n, Eigen::Index f) {
  FeatureMatrix X(n, f);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < f; ++j) X(i, j) = rng.normal(0.0, 1.0 + static_cast<double>(j));
  return X;
}

Eigen::MatrixXd one_vs_rest(const std::vector<int>& labels, int classes) {
  Eigen::MatrixXd Y = -Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) Y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return Y;
}

TEST(Ridge, ClosedFormLooMatchesExplicitRefits) {
  Rng rng(17);
  for (auto [n, f] : std::vector<std::pair<int, int>>{{10, 5}, {10, 25}}) {
    const FeatureMatrix X = random_matrix(rng, n, f);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.below(3)));
    const Eigen::MatrixXd Y = one_vs_rest(labels, 3);
    const auto alphas = default_alpha_grid();
    ASSERT_EQ(alphas.size(), 10u);
    const auto fast = ridge_loo_residuals(X, Y, alphas);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const Eigen::MatrixXd slow = oracle::loo_refit_residuals(X, Y, alphas[a]);
      EXPECT_LE((fast[a] - slow).cwiseAbs().maxCoeff(), 1e-8) << "n=" << n << " f=" << f << " alpha=" << alphas[a];
    }
  }
}

TEST(Ridge, SelectsLowestLooError) {
  Rng rng(18);
  const FeatureMatrix X = random_matrix(rng, 30, 6);
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 3);
  const auto m = ridge_fit(X, labels);
  ASSERT_EQ(m.loo_errors.size(), 10u);
  const auto best = std::min_element(m.loo_errors.begin(), m.loo_errors.end()) - m.loo_errors.begin();
  EXPECT_EQ(m.alpha, m.alphas[static_cast<std::size_t>(best)]);
}

TEST(Ridge, SmallAlphaApproachesLeastSquares) {
  Rng rng(19);
  const FeatureMatrix X = random_matrix(rng, 40, 4);
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(i % 2);
  const auto m = ridge_fit(X, labels, {1e-10});
  Eigen::MatrixXd A(40, 5);
  A.leftCols(4) = X;
  A.col(4).setOnes();
  const Eigen::MatrixXd sol = A.colPivHouseholderQr().solve(one_vs_rest(labels, 2));
  EXPECT_LE((m.weights - sol.topRows(4)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((m.intercept - sol.row(4).transpose()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Ridge, SeparableDataIsClassifiedPerfectly) {
  Rng rng(20);
  FeatureMatrix X(60, 5);
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    const int y = i % 4;
    labels.push_back(y);
    for (int j = 0; j < 4; ++j) X(i, j) = (j == y ? 3.0 : 0.0) + rng.normal(0.0, 0.3);
    X(i, 4) = rng.normal();
  }
  const FeatureMatrix Z = apply_scaler(fit_scaler(X), X);
  const auto m = ridge_fit(Z, labels);
  EXPECT_EQ(predict(m, Z), labels);
}

TEST(Ridge, DegenerateInputs) {
  FeatureMatrix X = FeatureMatrix::Zero(6, 2);
  EXPECT_THROW(ridge_fit(X, {0, 0, 0, 0, 0, 0}), Error);
  EXPECT_THROW(ridge_fit(X, {0, 1, 0}), Error);
  EXPECT_THROW(ridge_fit(X, {0, 1, 0, 1, 0, 1}, {}), Error);
}

TEST(Ridge, ArgmaxTiesGoToLowestIndex) {
  Eigen::RowVectorXd r(4);
  r << 0.5, 2.0, 2.0, -1.0;
  EXPECT_EQ(argmax_row(r), 1u);
}

TEST(Scaler, PopulationSdAndConstantColumns) {
  FeatureMatrix X(4, 2);
  X << 1, 7, 2, 7, 3, 7, 4, 7;
  const auto s = fit_scaler(X);
  EXPECT_DOUBLE_EQ(s.mean(0), 2.5);
  EXPECT_DOUBLE_EQ(s.scale(0), std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(s.mean(1), 7.0);
  EXPECT_DOUBLE_EQ(s.scale(1), 1.0);
  const FeatureMatrix Z = apply_scaler(s, X);
  EXPECT_NEAR(Z.col(0).mean(), 0.0, 1e-15);
  EXPECT_EQ(Z.col(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(apply_scaler(s, FeatureMatrix::Zero(2, 3)), Error);
}

Dataset participants_dataset(std::size_t participants, std::size_t per_participant) {
  Dataset d{{}, {"a"}, 12, 0};
  for (std::size_t p = 0; p < participants; ++p)
    for (std::size_t k = 0; k < per_participant; ++k) {
      char id[8];
      std::snprintf(id, sizeof id, "P%03zu", p);
      d.samples.push_back({MultivariateSeries({"a"}, 12), static_cast<ExerciseClass>(k % 4), id, id, k});
    }
  return d;
}

TEST(Split, CountsAreCeilOfRatio) {
  const auto d = participants_dataset(53, 2);
  const auto plan = grouped_split(d, 0.7, 0);
  EXPECT_EQ(plan.train_participants.size(), 38u);
  EXPECT_EQ(plan.test_participants.size(), 15u);
  EXPECT_EQ(plan.train_indices.size() + plan.test_indices.size(), d.size());
  EXPECT_NO_THROW(assert_disjoint(plan));
  EXPECT_EQ(grouped_split(participants_dataset(10, 1), 0.7, 3).train_participants.size(), 7u);
}

TEST(Split, ParticipantsNeverShared) {
  const auto d = participants_dataset(20, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto plan = grouped_split(d, 0.7, seed);
    std::set<std::string> train;
    for (auto i : plan.train_indices) train.insert(d.samples[i].participant_id);
    for (auto i : plan.test_indices) ASSERT_EQ(train.count(d.samples[i].participant_id), 0u);
  }
  EXPECT_EQ(grouped_split(d, 0.7, 4).train_participants, grouped_split(d, 0.7, 4).train_participants);
  EXPECT_NE(grouped_split(d, 0.7, 4).train_participants, grouped_split(d, 0.7, 5).train_participants);
}

TEST(Split, RatioOneLeavesTestEmpty) {
  const auto plan = grouped_split(participants_dataset(5, 2), 1.0, 0);
  EXPECT_TRUE(plan.test_indices.empty());
  EXPECT_THROW(grouped_split(participants_dataset(1, 4), 0.7, 0), Error);
  EXPECT_THROW(grouped_split(participants_dataset(5, 1), 0.0, 0), Error);
}

TEST(Metrics, ConfusionMatrix) {
  const auto m = confusion_matrix({0, 0, 1, 2, 3, 3}, {0, 1, 1, 2, 3, 0});
  EXPECT_EQ(m[0][0], 1u);
  EXPECT_EQ(m[0][1], 1u);
  EXPECT_EQ(m[3][0], 1u);
  EXPECT_DOUBLE_EQ(accuracy(m), 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(accuracy(confusion_matrix({2, 2}, {2, 2})), 1.0);
  try {
    confusion_matrix({0, 1}, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}

}  // namespace
}  // namespace exmts
