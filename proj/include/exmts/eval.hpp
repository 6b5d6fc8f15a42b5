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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exmts/body_parts.hpp"
#include "exmts/config.hpp"
#include "exmts/error.hpp"
#include "exmts/pipeline.hpp"
#include "exmts/rng.hpp"

namespace exmts {

/// Participant-level partition. No participant appears on both sides.
struct SplitPlan {
  std::vector<std::string> train_participants;
  std::vector<std::string> test_participants;
  std::uint64_t seed = 0;
  double ratio = 0.7;
  std::vector<std::size_t> train_indices;  ///< sample positions in the dataset
  std::vector<std::size_t> test_indices;
};

/// Shuffles the sorted participant ids with `seed` and puts the first
/// ceil(ratio * P) into the training side.
inline SplitPlan grouped_split(const Dataset& dataset, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) fail(ErrorKind::InvalidParams, "split ratio must lie in (0,1]");
  std::set<std::string> unique;
  for (const auto& s : dataset.samples) unique.insert(s.participant_id);
  if (unique.size() < 2) fail(ErrorKind::TooFewParticipants, "split needs >= 2 participants");
  std::vector<std::string> ids(unique.begin(), unique.end());
  Rng rng(seed);
  rng.shuffle(ids);
  const double exact = ratio * static_cast<double>(ids.size());
  // Guard against 0.7 * 10 = 7.000000000000001.
  auto n_train = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, ids.size());

  SplitPlan plan;
  plan.seed = seed;
  plan.ratio = ratio;
  plan.train_participants.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  plan.test_participants.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(plan.train_participants.begin(), plan.train_participants.end());
  std::sort(plan.test_participants.begin(), plan.test_participants.end());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& pid = dataset.samples[i].participant_id;
    if (std::binary_search(plan.train_participants.begin(), plan.train_participants.end(), pid))
      plan.train_indices.push_back(i);
    else
      plan.test_indices.push_back(i);
  }
  return plan;
}

/// Hard check that no participant is on both sides.
inline void assert_disjoint(const SplitPlan& plan) {
  for (const auto& p : plan.test_participants)
    if (std::binary_search(plan.train_participants.begin(), plan.train_participants.end(), p))
      fail(ErrorKind::InvalidParams, "participant " + p + " is in both train and test");
}

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

/// Entry (i, j) counts samples of true class i predicted as j.
inline ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                        std::size_t num_classes = kNumClasses) {
  if (truth.size() != predicted.size()) fail(ErrorKind::LengthMismatch, "label vectors differ in length");
  ConfusionMatrix m(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= num_classes ||
        static_cast<std::size_t>(predicted[i]) >= num_classes)
      fail(ErrorKind::InvalidParams, "label outside the class range");
    ++m[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return m;
}

inline double accuracy(const ConfusionMatrix& m) {
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      total += m[i][j];
      if (i == j) correct += m[i][j];
    }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

struct SplitResult {
  SplitPlan plan;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  double alpha = 0.0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
};

struct EvalReport {
  std::vector<SplitResult> splits;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;  ///< population sd over splits
  std::vector<std::size_t> class_counts;
  std::size_t num_samples = 0;
};

/// Grouped-split evaluation. Each split fits scaler and classifier (and the
/// MiniROCKET biases) on its training participants only. ROCKET kernels do
/// not depend on data, so the feature matrix is computed once and shared.
inline EvalReport evaluate(const Dataset& dataset, const PipelineConfig& config,
                           const std::vector<std::uint64_t>& seeds, std::size_t workers = 0) {
  config.validate();
  if (seeds.empty()) fail(ErrorKind::InvalidParams, "n_splits must be >= 1");
  if (dataset.empty()) fail(ErrorKind::EmptyDataset, "dataset is empty");
  dataset.validate();
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };

  EvalReport report;
  report.num_samples = dataset.size();
  report.class_counts.assign(kNumClasses, 0);
  for (const auto& s : dataset.samples) ++report.class_counts[static_cast<std::size_t>(s.label)];

  const auto inputs = model_inputs(dataset, config.normalize);
  const auto labels = dataset.labels();
  FeatureMatrix shared;
  double shared_seconds = 0.0;
  std::optional<KernelBank> bank;
  if (config.transform.kind == TransformKind::Rocket) {
    const auto t0 = Clock::now();
    bank = generate_kernels(config.transform.num_kernels, dataset.num_channels(), dataset.length,
                            config.transform.seed);
    shared = rocket_transform(inputs, *bank, workers);
    shared_seconds = seconds(t0, Clock::now());
  }

  auto rows = [](const FeatureMatrix& X, const std::vector<std::size_t>& idx) {
    FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
    return out;
  };
  auto pick = [](const auto& v, const std::vector<std::size_t>& idx) {
    std::decay_t<decltype(v)> out;
    for (auto i : idx) out.push_back(v[i]);
    return out;
  };

  for (auto seed : seeds) {
    SplitResult r;
    r.plan = grouped_split(dataset, config.eval.train_ratio, seed);
    assert_disjoint(r.plan);
    if (r.plan.test_indices.empty()) {
      report.splits.push_back(std::move(r));
      continue;
    }
    const auto y_train = pick(labels, r.plan.train_indices);
    const auto y_test = pick(labels, r.plan.test_indices);

    auto t0 = Clock::now();
    FeatureMatrix X_train, X_test;
    if (bank) {
      X_train = rows(shared, r.plan.train_indices);
    } else {
      const auto params = std::get<MiniRocketParams>(fit_transform(dataset.subset(r.plan.train_indices), config));
      X_train = minirocket_transform(pick(inputs, r.plan.train_indices), params, workers);
      X_test = minirocket_transform(pick(inputs, r.plan.test_indices), params, workers);
    }
    const auto scaler = fit_scaler(X_train);
    const auto ridge = ridge_fit(apply_scaler(scaler, X_train), y_train, config.alphas);
    auto t1 = Clock::now();
    if (bank) X_test = rows(shared, r.plan.test_indices);
    const auto predicted = predict(ridge, apply_scaler(scaler, X_test));
    auto t2 = Clock::now();

    r.confusion = confusion_matrix(y_test, predicted);
    r.accuracy = accuracy(r.confusion);
    r.alpha = ridge.alpha;
    const double n = static_cast<double>(dataset.size());
    r.train_seconds = seconds(t0, t1) + shared_seconds * static_cast<double>(r.plan.train_indices.size()) / n;
    r.test_seconds = seconds(t1, t2) + shared_seconds * static_cast<double>(r.plan.test_indices.size()) / n;
    report.splits.push_back(std::move(r));
  }

  // Splits with an empty test side (ratio 1) carry no accuracy.
  std::vector<double> acc;
  for (const auto& s : report.splits)
    if (!s.plan.test_indices.empty()) acc.push_back(s.accuracy);
  if (!acc.empty()) {
    double sum = 0.0;
    for (double a : acc) sum += a;
    report.mean_accuracy = sum / static_cast<double>(acc.size());
    double ss = 0.0;
    for (double a : acc) ss += (a - report.mean_accuracy) * (a - report.mean_accuracy);
    report.sd_accuracy = std::sqrt(ss / static_cast<double>(acc.size()));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report output

inline nlohmann::json to_json(const EvalReport& r, bool include_timing = true) {
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& s : r.splits) {
    nlohmann::json j = {
        {"seed", s.plan.seed},
        {"train_participants", s.plan.train_participants},
        {"test_participants", s.plan.test_participants},
        {"n_train", s.plan.train_indices.size()},
        {"n_test", s.plan.test_indices.size()},
        {"accuracy", s.accuracy},
        {"alpha", s.alpha},
        {"confusion", s.confusion},
    };
    if (include_timing) {
      j["train_seconds"] = s.train_seconds;
      j["test_seconds"] = s.test_seconds;
    }
    splits.push_back(std::move(j));
  }
  nlohmann::json counts;
  for (std::size_t k = 0; k < kNumClasses; ++k)
    counts[std::string(kClassNames[k])] = k < r.class_counts.size() ? r.class_counts[k] : 0;
  return {{"classes", std::vector<std::string>(kClassNames.begin(), kClassNames.end())},
          {"num_samples", r.num_samples},
          {"class_counts", counts},
          {"mean_accuracy", r.mean_accuracy},
          {"sd_accuracy", r.sd_accuracy},
          {"splits", splits}};
}

inline std::string to_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "seed,n_train,n_test,accuracy,alpha,train_seconds,test_seconds\n";
  for (const auto& s : r.splits)
    out << s.plan.seed << ',' << s.plan.train_indices.size() << ',' << s.plan.test_indices.size() << ','
        << s.accuracy << ',' << s.alpha << ',' << s.train_seconds << ',' << s.test_seconds << '\n';
  return out.str();
}

inline std::string to_table(const EvalReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "samples: " << r.num_samples << "  (";
  for (std::size_t k = 0; k < kNumClasses; ++k)
    out << (k ? ", " : "") << kClassNames[k] << "=" << r.class_counts[k];
  out << ")\n";
  for (const auto& s : r.splits) {
    out << "split seed " << s.plan.seed << ": accuracy " << s.accuracy << "  train "
        << s.plan.train_indices.size() << " / test " << s.plan.test_indices.size() << "  alpha "
        << s.alpha << "\n";
    out << "  true\\pred";
    for (auto n : kClassNames) out << std::setw(6) << n;
    out << "\n";
    for (std::size_t i = 0; i < s.confusion.size(); ++i) {
      out << "  " << std::setw(9) << kClassNames[i];
      for (auto v : s.confusion[i]) out << std::setw(6) << v;
      out << "\n";
    }
  }
  out << "mean accuracy " << r.mean_accuracy << " (+-" << r.sd_accuracy << ") over "
      << r.splits.size() << " splits\n";
  return out.str();
}

}  // namespace exmts
