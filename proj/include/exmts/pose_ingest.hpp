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
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "exmts/body_parts.hpp"
#include "exmts/error.hpp"
#include "exmts/series.hpp"

namespace exmts {

/// One body part in one frame. Pixel coordinates, origin top-left.
/// confidence == 0 means undetected; x and y are then not measurements.
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool detected() const { return confidence > 0.0; }
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

using KeypointArray = std::array<Keypoint, kNumBodyParts>;

struct KeypointFrame {
  std::size_t index = 0;
  KeypointArray points{};

  friend bool operator==(const KeypointFrame&, const KeypointFrame&) = default;
};

struct KeypointSequence {
  std::string clip_id;
  std::string participant_id;
  std::optional<ExerciseClass> label;
  std::vector<KeypointFrame> frames;
  double fps = 30.0;
};

/// Row of a clip manifest.
struct ClipMetadata {
  std::string clip_id;
  std::string participant_id;
  std::optional<ExerciseClass> label;
  std::string path;
  double fps = 30.0;
};

enum class Axis { X, Y };

/// Which (part, axis) pairs become series channels. Channel order is
/// parts-major in the listed order, X before Y.
struct ChannelSpec {
  std::vector<std::size_t> parts;
  bool use_x = true;
  bool use_y = true;

  /// Wrists, elbows, shoulders and hips with both axes: 16 channels.
  static ChannelSpec military_press() {
    return {{index_of(BodyPart::RShoulder), index_of(BodyPart::RElbow), index_of(BodyPart::RWrist),
             index_of(BodyPart::LShoulder), index_of(BodyPart::LElbow), index_of(BodyPart::LWrist),
             index_of(BodyPart::RHip), index_of(BodyPart::LHip)},
            true,
            true};
  }

  static ChannelSpec all_parts() {
    ChannelSpec spec;
    for (std::size_t i = 0; i < kNumBodyParts; ++i) spec.parts.push_back(i);
    return spec;
  }

  std::size_t axes_count() const { return (use_x ? 1u : 0u) + (use_y ? 1u : 0u); }
  std::size_t channel_count() const { return parts.size() * axes_count(); }

  void validate() const {
    if (parts.empty()) fail(ErrorKind::InvalidParams, "channel spec has no body parts");
    if (axes_count() == 0) fail(ErrorKind::InvalidParams, "channel spec has no axes");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i] >= kNumBodyParts)
        fail(ErrorKind::InvalidParams, "body part index out of range: " + std::to_string(parts[i]));
      for (std::size_t j = 0; j < i; ++j)
        if (parts[j] == parts[i])
          fail(ErrorKind::InvalidParams, "duplicate body part: " + std::to_string(parts[i]));
    }
  }

  std::vector<std::string> channel_names() const {
    std::vector<std::string> names;
    for (auto p : parts) {
      if (use_x) names.push_back(std::string(body_part_name(p)) + "_X");
      if (use_y) names.push_back(std::string(body_part_name(p)) + "_Y");
    }
    return names;
  }

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

struct QualityThresholds {
  double min_mean_confidence = 0.3;
  double max_undetected_fraction = 0.2;
};

struct QualityReport {
  std::array<double, kNumBodyParts> mean_confidence{};
  std::array<double, kNumBodyParts> undetected_fraction{};
  bool pass = true;
  std::vector<std::string> reasons;
};

// ---------------------------------------------------------------------------
// Frame documents

/// Parses one per-frame keypoint document:
///   {"people": [{"pose_keypoints_2d": [x0, y0, c0, ..., x24, y24, c24]}]}
/// Only the first person is used; extra people add a warning.
inline KeypointFrame parse_frame(std::string_view document, std::size_t index = 0,
                                 std::vector<std::string>* warnings = nullptr) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedDocument, std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("people") || !doc["people"].is_array())
    fail(ErrorKind::MalformedDocument, "missing \"people\" array");
  const auto& people = doc["people"];
  if (people.empty()) fail(ErrorKind::NoPersonDetected, "frame " + std::to_string(index));
  if (people.size() > 1 && warnings)
    warnings->push_back("frame " + std::to_string(index) + ": " + std::to_string(people.size()) +
                        " people detected, using the first");
  const auto& person = people.front();
  if (!person.is_object() || !person.contains("pose_keypoints_2d"))
    fail(ErrorKind::MalformedDocument, "person has no pose_keypoints_2d");
  const auto& flat = person["pose_keypoints_2d"];
  if (!flat.is_array() || flat.size() != 3 * kNumBodyParts)
    fail(ErrorKind::MalformedDocument,
         "pose_keypoints_2d must hold " + std::to_string(3 * kNumBodyParts) + " numbers");
  KeypointFrame frame;
  frame.index = index;
  for (std::size_t p = 0; p < kNumBodyParts; ++p) {
    double v[3];
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& e = flat[3 * p + k];
      if (!e.is_number()) fail(ErrorKind::MalformedDocument, "non-numeric keypoint value");
      v[k] = e.get<double>();
      if (!std::isfinite(v[k])) fail(ErrorKind::MalformedDocument, "non-finite keypoint value");
    }
    if (v[2] < 0.0 || v[2] > 1.0)
      fail(ErrorKind::MalformedDocument, "confidence outside [0,1] for part " + std::to_string(p));
    frame.points[p] = {v[0], v[1], v[2]};
  }
  return frame;
}

/// Writes the document format read by parse_frame.
inline std::string serialize_frame(const KeypointFrame& frame) {
  nlohmann::json flat = nlohmann::json::array();
  for (const auto& kp : frame.points) {
    flat.push_back(kp.x);
    flat.push_back(kp.y);
    flat.push_back(kp.confidence);
  }
  nlohmann::json doc;
  doc["version"] = 1.3;
  doc["people"] = nlohmann::json::array({nlohmann::json{{"pose_keypoints_2d", flat}}});
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Sequences

/// A frame as read from disk; points is empty when no person was detected.
struct RawFrame {
  std::size_t index = 0;
  std::optional<KeypointArray> points;
};

struct GapPolicy {
  std::size_t max_gap = 15;  ///< longest tolerated run of person-less frames
};

/// Builds a sequence from raw frames. Person-less frames and per-part
/// undetected keypoints get x,y linearly interpolated (by frame index)
/// between the nearest detected neighbours and confidence 0. Leading and
/// trailing runs copy the nearest detection.
inline KeypointSequence assemble_sequence(const ClipMetadata& meta, std::vector<RawFrame> raw,
                                          const GapPolicy& policy = {}) {
  if (raw.empty()) fail(ErrorKind::EmptyClip, "clip '" + meta.clip_id + "' has no frames");
  std::sort(raw.begin(), raw.end(),
            [](const RawFrame& a, const RawFrame& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < raw.size(); ++i)
    if (raw[i].index == raw[i - 1].index)
      fail(ErrorKind::MalformedDocument,
           "clip '" + meta.clip_id + "' has duplicate frame index " + std::to_string(raw[i].index));

  std::size_t run = 0;
  bool any_person = false;
  for (const auto& f : raw) {
    if (f.points) {
      any_person = true;
      run = 0;
    } else if (++run > policy.max_gap) {
      fail(ErrorKind::GapTooLarge, "clip '" + meta.clip_id + "' misses the person in more than " +
                                       std::to_string(policy.max_gap) +
                                       " consecutive frames (at frame " +
                                       std::to_string(f.index) + ")");
    }
  }
  if (!any_person)
    fail(ErrorKind::EmptyClip, "clip '" + meta.clip_id + "' has no frame with a person");

  KeypointSequence seq;
  seq.clip_id = meta.clip_id;
  seq.participant_id = meta.participant_id;
  seq.label = meta.label;
  seq.fps = meta.fps;
  seq.frames.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    seq.frames[i].index = raw[i].index;
    if (raw[i].points) seq.frames[i].points = *raw[i].points;
  }

  const std::size_t n = raw.size();
  for (std::size_t p = 0; p < kNumBodyParts; ++p) {
    auto observed = [&](std::size_t i) {
      return raw[i].points && (*raw[i].points)[p].detected();
    };
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < n; ++i) {
      if (observed(i)) {
        prev = i;
        continue;
      }
      std::optional<std::size_t> next;
      for (std::size_t j = i + 1; j < n; ++j)
        if (observed(j)) {
          next = j;
          break;
        }
      Keypoint& kp = seq.frames[i].points[p];
      kp.confidence = 0.0;
      if (prev && next) {
        const auto& a = seq.frames[*prev].points[p];
        const auto& b = seq.frames[*next].points[p];
        const double t0 = static_cast<double>(raw[*prev].index);
        const double t1 = static_cast<double>(raw[*next].index);
        const double w = (static_cast<double>(raw[i].index) - t0) / (t1 - t0);
        kp.x = a.x + w * (b.x - a.x);
        kp.y = a.y + w * (b.y - a.y);
      } else if (prev) {
        kp.x = seq.frames[*prev].points[p].x;
        kp.y = seq.frames[*prev].points[p].y;
      } else if (next) {
        kp.x = seq.frames[*next].points[p].x;
        kp.y = seq.frames[*next].points[p].y;
      } else {
        kp.x = 0.0;
        kp.y = 0.0;
      }
    }
  }
  return seq;
}

/// Frame index encoded in a file name: the last run of digits in the stem.
inline std::optional<std::size_t> frame_index_from_name(std::string_view stem) {
  std::size_t end = stem.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(stem[end - 1]))) --end;
  if (end == 0) return std::nullopt;
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  return static_cast<std::size_t>(std::stoull(std::string(stem.substr(begin, end - begin))));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Loads a clip directory holding one keypoint document per frame.
inline KeypointSequence load_sequence(const std::filesystem::path& directory,
                                      const ClipMetadata& meta, const GapPolicy& policy = {},
                                      std::vector<std::string>* warnings = nullptr) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    fail(ErrorKind::Io, "clip '" + meta.clip_id + "': not a directory: " + directory.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::EmptyClip, "clip '" + meta.clip_id + "' has no frame files");

  std::vector<RawFrame> raw;
  raw.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto index = frame_index_from_name(files[i].stem().string()).value_or(i);
    try {
      auto frame = parse_frame(read_file(files[i]), index, warnings);
      raw.push_back({index, frame.points});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoPersonDetected)
        throw Error(e.kind(), "clip '" + meta.clip_id + "', " + files[i].filename().string() +
                                  ": " + e.what());
      raw.push_back({index, std::nullopt});
    }
  }
  return assemble_sequence(meta, std::move(raw), policy);
}

/// One channel per (part, axis), taking every frame_step-th frame.
inline MultivariateSeries extract_series(const KeypointSequence& seq, const ChannelSpec& spec,
                                         std::size_t frame_step = 1) {
  spec.validate();
  if (frame_step == 0) fail(ErrorKind::InvalidParams, "frame_step must be >= 1");
  if (seq.frames.empty()) fail(ErrorKind::EmptyClip, "clip '" + seq.clip_id + "' has no frames");
  const std::size_t len = (seq.frames.size() + frame_step - 1) / frame_step;
  MultivariateSeries out(spec.channel_names(), len);
  std::size_t c = 0;
  for (auto p : spec.parts) {
    for (int axis = 0; axis < 2; ++axis) {
      if ((axis == 0 && !spec.use_x) || (axis == 1 && !spec.use_y)) continue;
      auto ch = out.channel(c++);
      for (std::size_t t = 0; t < len; ++t) {
        const auto& kp = seq.frames[t * frame_step].points[p];
        ch[t] = axis == 0 ? kp.x : kp.y;
      }
    }
  }
  return out;
}

/// Per-part confidence statistics; fails when a requested part is weakly
/// or rarely detected. Parts outside the spec never fail the gate.
inline QualityReport quality_gate(const KeypointSequence& seq, const ChannelSpec& spec,
                                  const QualityThresholds& thresholds = {}) {
  QualityReport report;
  const double n = static_cast<double>(seq.frames.size());
  if (seq.frames.empty()) {
    report.pass = false;
    report.reasons.push_back("no frames");
    return report;
  }
  for (std::size_t p = 0; p < kNumBodyParts; ++p) {
    double sum = 0.0;
    std::size_t missing = 0;
    for (const auto& f : seq.frames) {
      sum += f.points[p].confidence;
      if (!f.points[p].detected()) ++missing;
    }
    report.mean_confidence[p] = sum / n;
    report.undetected_fraction[p] = static_cast<double>(missing) / n;
  }
  for (auto p : spec.parts) {
    if (p >= kNumBodyParts) continue;
    const std::string name(body_part_name(p));
    if (report.mean_confidence[p] < thresholds.min_mean_confidence) {
      report.pass = false;
      report.reasons.push_back(name + " mean confidence " +
                               std::to_string(report.mean_confidence[p]));
    }
    if (report.undetected_fraction[p] > thresholds.max_undetected_fraction) {
      report.pass = false;
      report.reasons.push_back(name + " undetected in " +
                               std::to_string(report.undetected_fraction[p]) + " of frames");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Manifests

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<ExerciseClass> parse_label_field(const std::string& s, const std::string& clip) {
  if (s.empty()) return std::nullopt;
  auto label = parse_class(s);
  if (!label) fail(ErrorKind::FormatError, "clip '" + clip + "': unknown class label '" + s + "'");
  return label;
}

}  // namespace detail

/// Reads a manifest. `.json` files hold an array of objects with keys
/// clip_id, participant_id, class_label, path, fps; anything else is read
/// as CSV with a header row naming the same columns. Relative paths are
/// resolved against the manifest's directory.
inline std::vector<ClipMetadata> read_manifest(const std::filesystem::path& manifest) {
  const std::string text = read_file(manifest);
  const auto base = manifest.parent_path();
  std::vector<ClipMetadata> clips;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return (path.is_relative() ? base / path : path).lexically_normal().string();
  };
  if (manifest.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::FormatError, std::string("manifest: ") + e.what());
    }
    if (!doc.is_array()) fail(ErrorKind::FormatError, "manifest must be a JSON array");
    try {
      for (const auto& row : doc) {
        ClipMetadata m;
        m.clip_id = row.at("clip_id").get<std::string>();
        m.participant_id = row.at("participant_id").get<std::string>();
        m.label = detail::parse_label_field(row.value("class_label", std::string{}), m.clip_id);
        m.path = resolve(row.at("path").get<std::string>());
        m.fps = row.value("fps", 30.0);
        clips.push_back(std::move(m));
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::FormatError, std::string("manifest: ") + e.what());
    }
    return clips;
  }

  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (header.empty()) {
      header = fields;
      continue;
    }
    auto col = [&](std::string_view name) -> std::optional<std::string> {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i < fields.size() ? fields[i] : std::string{};
      return std::nullopt;
    };
    ClipMetadata m;
    auto clip = col("clip_id"), participant = col("participant_id"), path = col("path");
    if (!clip || !participant || !path)
      fail(ErrorKind::FormatError, "manifest needs clip_id, participant_id and path columns");
    m.clip_id = *clip;
    m.participant_id = *participant;
    m.label = detail::parse_label_field(col("class_label").value_or(""), m.clip_id);
    m.path = resolve(*path);
    if (auto fps = col("fps"); fps && !fps->empty()) {
      try {
        m.fps = std::stod(*fps);
      } catch (const std::exception&) {
        fail(ErrorKind::FormatError, "clip '" + m.clip_id + "': bad fps '" + *fps + "'");
      }
    }
    clips.push_back(std::move(m));
  }
  return clips;
}

}  // namespace exmts
