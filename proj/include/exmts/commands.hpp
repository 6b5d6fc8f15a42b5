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

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exmts/config.hpp"
#include "exmts/error.hpp"
#include "exmts/eval.hpp"
#include "exmts/io.hpp"
#include "exmts/parallel.hpp"
#include "exmts/pipeline.hpp"
#include "exmts/pose_ingest.hpp"
#include "exmts/synth.hpp"

namespace exmts {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidParams, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// synth

struct SynthSummary {
  std::filesystem::path manifest;
  std::size_t clips = 0;
  std::size_t frames = 0;
};

inline SynthSummary cmd_synth(const SynthConfig& config, const std::filesystem::path& out_dir) {
  const auto corpus = generate_dataset(config);
  SynthSummary s;
  s.manifest = write_corpus(corpus, out_dir);
  s.clips = corpus.clips.size();
  for (const auto& c : corpus.clips) s.frames += c.frames.size();
  return s;
}

// ---------------------------------------------------------------------------
// ingest

struct ClipReport {
  std::string clip_id;
  bool rejected = false;
  std::vector<std::string> reasons;
  std::size_t reps = 0;
  std::size_t dropped = 0;
  bool count_mismatch = false;
  std::vector<std::string> warnings;
};

struct IngestSummary {
  Dataset dataset;
  std::vector<ClipReport> clips;
};

/// Builds a dataset from already loaded clips, in the given order. Clips
/// failing the quality gate are rejected, not fatal.
inline IngestSummary ingest_sequences(const std::vector<KeypointSequence>& clips, const PipelineConfig& config,
                                      std::size_t workers = 0) {
  config.validate();
  std::vector<ClipSamples> prepared(clips.size());
  parallel_for(clips.size(), workers, [&](std::size_t i) { prepared[i] = prepare_clip(clips[i], config); });
  IngestSummary out{empty_dataset(config), {}};
  for (std::size_t i = 0; i < clips.size(); ++i) {
    ClipReport rep;
    rep.clip_id = clips[i].clip_id;
    if (!clips[i].label) fail(ErrorKind::FormatError, "clip '" + clips[i].clip_id + "' has no class label");
    if (!prepared[i].quality.pass) {
      rep.rejected = true;
      rep.reasons = prepared[i].quality.reasons;
    } else {
      rep.reps = prepared[i].samples.size();
      rep.dropped = prepared[i].dropped.size();
      rep.count_mismatch = prepared[i].count_mismatch;
      for (auto& s : prepared[i].samples) out.dataset.samples.push_back(std::move(s));
    }
    out.clips.push_back(std::move(rep));
  }
  return out;
}

inline IngestSummary cmd_ingest(const std::filesystem::path& manifest, const PipelineConfig& config,
                                const std::filesystem::path& out, std::size_t workers = 0) {
  const auto rows = read_manifest(manifest);
  if (rows.empty()) fail(ErrorKind::EmptyDataset, "manifest lists no clips");
  std::vector<KeypointSequence> clips(rows.size());
  std::vector<std::vector<std::string>> warnings(rows.size());
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    clips[i] = load_sequence(rows[i].path, rows[i], config.gaps, &warnings[i]);
  });
  auto summary = ingest_sequences(clips, config, workers);
  for (std::size_t i = 0; i < rows.size(); ++i) summary.clips[i].warnings = std::move(warnings[i]);
  if (summary.dataset.empty()) fail(ErrorKind::EmptyDataset, "no clip produced repetitions");
  save_dataset(out, summary.dataset, preprocessing_json(config));
  return summary;
}

/// Effective config for a stored dataset: its recorded preprocessing with
/// `overrides` applied on top. Overrides may not change preprocessing.
inline PipelineConfig config_for_dataset(const DatasetFile& file, const nlohmann::json& overrides) {
  const auto base = config_from_json(file.config);
  auto config = config_from_json(overrides, base);
  if (preprocessing_hash(config) != file.dataset.config_hash)
    fail(ErrorKind::ConfigMismatch, "config preprocessing (hash " + hex64(preprocessing_hash(config)) +
                                        ") differs from the dataset's (hash " + hex64(file.dataset.config_hash) + ")");
  return config;
}

// ---------------------------------------------------------------------------
// train

inline TrainedModel cmd_train(const std::filesystem::path& dataset_path, const nlohmann::json& overrides,
                              const std::filesystem::path& model_out, std::size_t workers = 0) {
  const auto file = load_dataset(dataset_path);
  const auto config = config_for_dataset(file, overrides);
  auto model = train_model(file.dataset, config, workers);
  save_model(model_out, model);
  return model;
}

// ---------------------------------------------------------------------------
// predict

/// Segments one clip with the model's preprocessing and classifies each
/// repetition. A supplied config must hash to the model's preprocessing.
inline nlohmann::json predict_clip(const TrainedModel& model, const KeypointSequence& clip, std::size_t workers = 0) {
  const auto prepared = prepare_clip(clip, model.config);
  std::vector<MultivariateSeries> series;
  for (const auto& s : prepared.samples) series.push_back(s.series);
  const auto pred = predict_series(model, series, workers);

  nlohmann::json reps = nlohmann::json::array();
  const std::size_t step = model.config.frame_step;
  for (std::size_t r = 0; r < series.size(); ++r) {
    nlohmann::json scores;
    for (std::size_t k = 0; k < model.ridge.classes.size(); ++k)
      scores[std::string(kClassNames[static_cast<std::size_t>(model.ridge.classes[k])])] =
          pred.scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
    reps.push_back({{"rep", r},
                    {"start_frame", clip.frames[prepared.segments[r].begin * step].index},
                    {"end_frame", clip.frames[std::min(clip.frames.size() - 1, (prepared.segments[r].end - 1) * step)].index},
                    {"label", std::string(kClassNames[static_cast<std::size_t>(pred.labels[r])])},
                    {"scores", scores}});
  }
  return {{"clip", clip.clip_id},
          {"config_hash", hex64(model.config_hash)},
          {"quality", {{"pass", prepared.quality.pass}, {"reasons", prepared.quality.reasons}}},
          {"dropped", prepared.dropped.size()},
          {"count_mismatch", prepared.count_mismatch},
          {"repetitions", reps}};
}

inline nlohmann::json cmd_predict(const std::filesystem::path& model_path, const std::filesystem::path& clip_dir,
                                  const std::optional<nlohmann::json>& config = std::nullopt,
                                  std::size_t workers = 0) {
  const auto model = load_model(model_path);
  if (config) {
    const auto requested = config_from_json(*config, model.config);
    if (preprocessing_hash(requested) != model.config_hash)
      fail(ErrorKind::ConfigMismatch, "clip pipeline config (hash " + hex64(preprocessing_hash(requested)) +
                                          ") differs from the model's (hash " + hex64(model.config_hash) + ")");
  }
  ClipMetadata meta;
  meta.clip_id = std::filesystem::path(clip_dir).lexically_normal().filename().string();
  if (meta.clip_id.empty()) meta.clip_id = std::filesystem::path(clip_dir).parent_path().filename().string();
  std::vector<std::string> warnings;
  const auto clip = load_sequence(clip_dir, meta, model.config.gaps, &warnings);
  auto out = predict_clip(model, clip, workers);
  out["warnings"] = warnings;
  return out;
}

// ---------------------------------------------------------------------------
// evaluate

inline EvalReport cmd_evaluate(const std::filesystem::path& dataset_path, const nlohmann::json& overrides,
                               std::size_t workers = 0) {
  const auto file = load_dataset(dataset_path);
  const auto config = config_for_dataset(file, overrides);
  return evaluate(file.dataset, config, config.eval.seeds, workers);
}

}  // namespace exmts
