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

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "exmts/config.hpp"
#include "exmts/error.hpp"
#include "exmts/features.hpp"
#include "exmts/linear_clf.hpp"
#include "exmts/minirocket.hpp"
#include "exmts/pose_ingest.hpp"
#include "exmts/rocket.hpp"
#include "exmts/series_prep.hpp"

namespace exmts {

/// Outcome of turning one clip into repetition samples.
struct ClipSamples {
  QualityReport quality;
  std::vector<Segment> segments;
  std::vector<Segment> dropped;
  bool count_mismatch = false;
  std::vector<RepetitionSample> samples;
};

/// Channel extraction, segmentation and resampling of one clip. Does not
/// reject on quality; the report is returned for the caller to act on.
inline ClipSamples prepare_clip(const KeypointSequence& seq, const PipelineConfig& config) {
  ClipSamples out;
  out.quality = quality_gate(seq, config.channels, config.quality);
  const auto series = extract_series(seq, config.channels, config.frame_step);

  if (config.segmentation_method == SegmentationMethod::Equal) {
    out.segments = segment_equal(series.length(), config.equal_reps);
  } else {
    ChannelSpec anchor_spec{config.segmentation.anchor_parts, false, true};
    const auto anchor = extract_series(seq, anchor_spec, config.frame_step);
    try {
      auto seg = segment_repetitions(anchor, config.segmentation);
      out.segments = std::move(seg.segments);
      out.dropped = std::move(seg.dropped);
      out.count_mismatch = seg.count_mismatch;
    } catch (const Error& e) {
      throw Error(e.kind(), "clip '" + seq.clip_id + "': " + e.what());
    }
  }

  const ExerciseClass label = seq.label.value_or(ExerciseClass::N);
  for (std::size_t r = 0; r < out.segments.size(); ++r) {
    const auto& s = out.segments[r];
    if (s.size() < 4) fail(ErrorKind::TooShort, "clip '" + seq.clip_id + "': repetition shorter than 4 samples");
    out.samples.push_back({resample_cubic(series.slice(s.begin, s.end), config.length), label,
                           seq.participant_id, seq.clip_id, r});
  }
  return out;
}

inline Dataset empty_dataset(const PipelineConfig& config) {
  return {{}, config.channels.channel_names(), config.length, preprocessing_hash(config)};
}

// ---------------------------------------------------------------------------
// Trained model

struct TrainedModel {
  PipelineConfig config;
  std::uint64_t config_hash = 0;  ///< preprocessing hash of the training data
  std::vector<std::string> channel_names;
  std::size_t length = 0;
  std::variant<KernelBank, MiniRocketParams> transform;
  FeatureScaler scaler;
  RidgeModel ridge;
};

inline MultivariateSeries model_input(const MultivariateSeries& s, bool normalize) {
  return normalize ? znormalize(s) : s;
}

/// Features of the given series under a fitted transform.
inline FeatureMatrix featurize(const std::variant<KernelBank, MiniRocketParams>& transform,
                               std::span<const MultivariateSeries> series, std::size_t workers) {
  if (const auto* bank = std::get_if<KernelBank>(&transform)) return rocket_transform(series, *bank, workers);
  return minirocket_transform(series, std::get<MiniRocketParams>(transform), workers);
}

inline std::vector<MultivariateSeries> model_inputs(const Dataset& d, bool normalize) {
  std::vector<MultivariateSeries> out;
  out.reserve(d.size());
  for (const auto& s : d.samples) out.push_back(model_input(s.series, normalize));
  return out;
}

/// Fits the transform on `train` (kernel generation for ROCKET, bias
/// fitting for MiniROCKET).
inline std::variant<KernelBank, MiniRocketParams> fit_transform(const Dataset& train,
                                                                const PipelineConfig& config) {
  if (config.transform.kind == TransformKind::Rocket)
    return generate_kernels(config.transform.num_kernels, train.num_channels(), train.length,
                            config.transform.seed);
  Dataset input = train;
  if (config.normalize)
    for (auto& s : input.samples) s.series = znormalize(s.series);
  return minirocket_fit(input, config.transform.seed,
                        {config.transform.num_features, config.transform.minirocket_normalize});
}

/// Transform, scaler and ridge classifier fitted on every sample of `train`.
inline TrainedModel train_model(const Dataset& train, const PipelineConfig& config, std::size_t workers = 0) {
  config.validate();
  if (train.empty()) fail(ErrorKind::EmptyDataset, "no training samples");
  train.validate();
  if (train.config_hash != preprocessing_hash(config))
    fail(ErrorKind::ConfigMismatch, "dataset was built with a different preprocessing config");
  TrainedModel m;
  m.config = config;
  m.config_hash = train.config_hash;
  m.channel_names = train.channel_names;
  m.length = train.length;
  m.transform = fit_transform(train, config);
  const auto inputs = model_inputs(train, config.normalize);
  const FeatureMatrix raw = featurize(m.transform, inputs, workers);
  m.scaler = fit_scaler(raw);
  m.ridge = ridge_fit(apply_scaler(m.scaler, raw), train.labels(), config.alphas);
  return m;
}

struct Prediction {
  std::vector<int> labels;
  Eigen::MatrixXd scores;  ///< N x classes, columns ordered as ridge.classes
};

inline Prediction predict_series(const TrainedModel& m, std::span<const MultivariateSeries> series,
                                 std::size_t workers = 0) {
  std::vector<MultivariateSeries> inputs;
  inputs.reserve(series.size());
  for (const auto& s : series) {
    if (s.names() != m.channel_names || s.length() != m.length)
      fail(ErrorKind::ShapeMismatch, "series does not match the model's channels/length");
    inputs.push_back(model_input(s, m.config.normalize));
  }
  Prediction p;
  if (inputs.empty()) return p;
  const FeatureMatrix X = apply_scaler(m.scaler, featurize(m.transform, inputs, workers));
  p.scores = predict_scores(m.ridge, X);
  p.labels = predict_from_scores(m.ridge, p.scores);
  return p;
}

}  // namespace exmts
