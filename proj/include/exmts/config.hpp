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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "exmts/body_parts.hpp"
#include "exmts/error.hpp"
#include "exmts/linear_clf.hpp"
#include "exmts/pose_ingest.hpp"
#include "exmts/rng.hpp"
#include "exmts/series_prep.hpp"

namespace exmts {

enum class TransformKind { Rocket, MiniRocket };
enum class SegmentationMethod { Peaks, Equal };

struct TransformConfig {
  TransformKind kind = TransformKind::Rocket;
  std::size_t num_kernels = 10000;   ///< ROCKET
  std::size_t num_features = 10000;  ///< MiniROCKET
  bool minirocket_normalize = true;
  std::uint64_t seed = 0;
};

struct EvalConfig {
  double train_ratio = 0.7;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
};

/// Every knob of the pipeline. The preprocessing part (everything that
/// shapes a dataset file) is hashed into datasets and models.
struct PipelineConfig {
  ChannelSpec channels = ChannelSpec::military_press();
  std::size_t frame_step = 1;
  GapPolicy gaps;
  QualityThresholds quality;
  SegmentationMethod segmentation_method = SegmentationMethod::Peaks;
  SegmentationParams segmentation;
  std::size_t equal_reps = 10;
  std::size_t length = 161;

  bool normalize = false;
  TransformConfig transform;
  std::vector<double> alphas = default_alpha_grid();
  EvalConfig eval;

  void validate() const {
    channels.validate();
    if (frame_step == 0) fail(ErrorKind::InvalidParams, "frame_step must be >= 1");
    segmentation.validate();
    if (equal_reps == 0) fail(ErrorKind::InvalidParams, "equal_reps must be >= 1");
    if (length < 12) fail(ErrorKind::InvalidParams, "length must be >= 12");
    if (transform.num_kernels == 0) fail(ErrorKind::InvalidParams, "num_kernels must be >= 1");
    if (transform.num_features < 84) fail(ErrorKind::InvalidParams, "num_features must be >= 84");
    if (alphas.empty()) fail(ErrorKind::InvalidParams, "alpha grid is empty");
    if (!(eval.train_ratio > 0.0 && eval.train_ratio <= 1.0))
      fail(ErrorKind::InvalidParams, "train_ratio must lie in (0,1]");
  }
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline std::vector<std::string> part_names(const std::vector<std::size_t>& parts) {
  std::vector<std::string> out;
  for (auto p : parts) out.emplace_back(body_part_name(p));
  return out;
}

inline std::vector<std::size_t> parse_parts(const nlohmann::json& j) {
  std::vector<std::size_t> parts;
  for (const auto& e : j) {
    if (e.is_number_integer()) {
      parts.push_back(e.get<std::size_t>());
    } else if (e.is_string()) {
      auto idx = body_part_index(e.get<std::string>());
      if (!idx) fail(ErrorKind::InvalidParams, "unknown body part '" + e.get<std::string>() + "'");
      parts.push_back(*idx);
    } else {
      fail(ErrorKind::InvalidParams, "body parts must be names or indices");
    }
  }
  return parts;
}

}  // namespace detail

/// The part of the config that determines dataset contents.
inline nlohmann::json preprocessing_json(const PipelineConfig& c) {
  nlohmann::json axes = nlohmann::json::array();
  if (c.channels.use_x) axes.push_back("X");
  if (c.channels.use_y) axes.push_back("Y");
  nlohmann::json seg = {
      {"method", c.segmentation_method == SegmentationMethod::Peaks ? "peaks" : "equal"},
      {"anchor_parts", detail::part_names(c.segmentation.anchor_parts)},
      {"window", c.segmentation.window},
      {"polyorder", c.segmentation.polyorder},
      {"min_prominence", c.segmentation.min_prominence},
      {"invert_y", c.segmentation.invert_y},
      {"min_segment_fraction", c.segmentation.min_segment_fraction},
      {"equal_reps", c.equal_reps},
  };
  seg["min_peak_distance"] = c.segmentation.min_peak_distance
                                 ? nlohmann::json(*c.segmentation.min_peak_distance)
                                 : nlohmann::json(nullptr);
  seg["expected_reps"] = c.segmentation.expected_reps ? nlohmann::json(*c.segmentation.expected_reps)
                                                      : nlohmann::json(nullptr);
  return {
      {"channels", {{"parts", detail::part_names(c.channels.parts)}, {"axes", axes}}},
      {"frame_step", c.frame_step},
      {"max_gap", c.gaps.max_gap},
      {"quality",
       {{"min_mean_confidence", c.quality.min_mean_confidence},
        {"max_undetected_fraction", c.quality.max_undetected_fraction}}},
      {"segmentation", seg},
      {"length", c.length},
  };
}

inline nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j = preprocessing_json(c);
  j["normalize"] = c.normalize;
  j["transform"] = {
      {"kind", c.transform.kind == TransformKind::Rocket ? "rocket" : "minirocket"},
      {"num_kernels", c.transform.num_kernels},
      {"num_features", c.transform.num_features},
      {"minirocket_normalize", c.transform.minirocket_normalize},
      {"seed", c.transform.seed},
  };
  j["alphas"] = c.alphas;
  j["eval"] = {{"train_ratio", c.eval.train_ratio}, {"seeds", c.eval.seeds}};
  return j;
}

/// Reads a config; absent keys keep their defaults.
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c = {}) {
  try {
    if (j.contains("channels")) {
      const auto& ch = j["channels"];
      if (ch.contains("parts")) c.channels.parts = detail::parse_parts(ch["parts"]);
      if (ch.contains("axes")) {
        c.channels.use_x = c.channels.use_y = false;
        for (const auto& a : ch["axes"]) {
          const auto s = a.get<std::string>();
          if (s == "X" || s == "x") c.channels.use_x = true;
          else if (s == "Y" || s == "y") c.channels.use_y = true;
          else fail(ErrorKind::InvalidParams, "unknown axis '" + s + "'");
        }
      }
    }
    c.frame_step = j.value("frame_step", c.frame_step);
    c.gaps.max_gap = j.value("max_gap", c.gaps.max_gap);
    if (j.contains("quality")) {
      const auto& q = j["quality"];
      c.quality.min_mean_confidence = q.value("min_mean_confidence", c.quality.min_mean_confidence);
      c.quality.max_undetected_fraction =
          q.value("max_undetected_fraction", c.quality.max_undetected_fraction);
    }
    if (j.contains("segmentation")) {
      const auto& s = j["segmentation"];
      if (s.contains("method")) {
        const auto m = s["method"].get<std::string>();
        if (m == "peaks") c.segmentation_method = SegmentationMethod::Peaks;
        else if (m == "equal") c.segmentation_method = SegmentationMethod::Equal;
        else fail(ErrorKind::InvalidParams, "unknown segmentation method '" + m + "'");
      }
      if (s.contains("anchor_parts")) c.segmentation.anchor_parts = detail::parse_parts(s["anchor_parts"]);
      c.segmentation.window = s.value("window", c.segmentation.window);
      c.segmentation.polyorder = s.value("polyorder", c.segmentation.polyorder);
      c.segmentation.min_prominence = s.value("min_prominence", c.segmentation.min_prominence);
      c.segmentation.invert_y = s.value("invert_y", c.segmentation.invert_y);
      c.segmentation.min_segment_fraction =
          s.value("min_segment_fraction", c.segmentation.min_segment_fraction);
      c.equal_reps = s.value("equal_reps", c.equal_reps);
      if (s.contains("min_peak_distance"))
        c.segmentation.min_peak_distance =
            s["min_peak_distance"].is_null() ? std::nullopt
                                             : std::optional(s["min_peak_distance"].get<std::size_t>());
      if (s.contains("expected_reps"))
        c.segmentation.expected_reps =
            s["expected_reps"].is_null() ? std::nullopt
                                         : std::optional(s["expected_reps"].get<std::size_t>());
    }
    c.length = j.value("length", c.length);
    c.normalize = j.value("normalize", c.normalize);
    if (j.contains("transform")) {
      const auto& t = j["transform"];
      if (t.contains("kind")) {
        const auto k = t["kind"].get<std::string>();
        if (k == "rocket") c.transform.kind = TransformKind::Rocket;
        else if (k == "minirocket") c.transform.kind = TransformKind::MiniRocket;
        else fail(ErrorKind::InvalidParams, "unknown transform '" + k + "'");
      }
      c.transform.num_kernels = t.value("num_kernels", c.transform.num_kernels);
      c.transform.num_features = t.value("num_features", c.transform.num_features);
      c.transform.minirocket_normalize = t.value("minirocket_normalize", c.transform.minirocket_normalize);
      c.transform.seed = t.value("seed", c.transform.seed);
    }
    if (j.contains("alphas")) c.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("eval")) {
      const auto& e = j["eval"];
      c.eval.train_ratio = e.value("train_ratio", c.eval.train_ratio);
      if (e.contains("seeds")) c.eval.seeds = e["seeds"].get<std::vector<std::uint64_t>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidParams, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline std::uint64_t hash_json(const nlohmann::json& j) {
  Fnv1a h;
  h.update(j.dump());
  return h.digest();
}

/// Hash of the preprocessing config, embedded in dataset and model files.
inline std::uint64_t preprocessing_hash(const PipelineConfig& c) { return hash_json(preprocessing_json(c)); }

}  // namespace exmts
