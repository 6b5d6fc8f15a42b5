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

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exmts/body_parts.hpp"
#include "exmts/error.hpp"
#include "exmts/pose_ingest.hpp"
#include "exmts/rng.hpp"

namespace exmts {

/// Synthetic Military Press corpus. Every participant records one clip per
/// class. Magnitudes are in pixels at body scale 1.
struct SynthConfig {
  std::size_t participants = 10;
  std::size_t reps_per_clip = 10;
  double fps = 30.0;
  double rep_period_s = 3.0;
  double period_jitter = 0.2;      ///< participant tempo varies by +-20%
  double rep_jitter = 0.05;        ///< and each rep by +-5%
  double rest_s = 0.5;             ///< still frames before and after the set
  double amplitude_px = 170.0;     ///< wrist travel, rack to lockout
  double amplitude_jitter = 0.3;   ///< per participant, relative
  double noise_sd_px = 8.0;
  double asymmetry_ratio = 0.7;    ///< class A: left-side travel / right-side travel
  double reduced_range_scale = 0.6;  ///< class R: travel relative to N, trough raised
  double arch_drift_px = 14.0;     ///< class Arch: hip x shift at lockout
  double min_confidence = 0.8;
  double max_confidence = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (participants == 0 || reps_per_clip == 0 || !(fps > 0) || !(rep_period_s > 0) ||
        !(amplitude_px > 0) || noise_sd_px < 0 || period_jitter < 0 || period_jitter >= 1 ||
        rep_jitter < 0 || rep_jitter >= 1 || rest_s < 0 || !(asymmetry_ratio > 0) ||
        !(reduced_range_scale > 0) || reduced_range_scale > 1 || arch_drift_px < 0 ||
        amplitude_jitter < 0 || amplitude_jitter >= 1 || !(min_confidence > 0) ||
        max_confidence > 1 || min_confidence > max_confidence)
      fail(ErrorKind::InvalidParams, "invalid synthetic data config");
  }
};

inline SynthConfig synth_config_from_json(const nlohmann::json& j, SynthConfig c = {}) {
  try {
    c.participants = j.value("participants", c.participants);
    c.reps_per_clip = j.value("reps_per_clip", c.reps_per_clip);
    c.fps = j.value("fps", c.fps);
    c.rep_period_s = j.value("rep_period_s", c.rep_period_s);
    c.period_jitter = j.value("period_jitter", c.period_jitter);
    c.rep_jitter = j.value("rep_jitter", c.rep_jitter);
    c.rest_s = j.value("rest_s", c.rest_s);
    c.amplitude_px = j.value("amplitude_px", c.amplitude_px);
    c.amplitude_jitter = j.value("amplitude_jitter", c.amplitude_jitter);
    c.noise_sd_px = j.value("noise_sd_px", c.noise_sd_px);
    c.asymmetry_ratio = j.value("asymmetry_ratio", c.asymmetry_ratio);
    c.reduced_range_scale = j.value("reduced_range_scale", c.reduced_range_scale);
    c.arch_drift_px = j.value("arch_drift_px", c.arch_drift_px);
    c.min_confidence = j.value("min_confidence", c.min_confidence);
    c.max_confidence = j.value("max_confidence", c.max_confidence);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidParams, std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

/// Per-participant body placement and tempo.
struct ParticipantProfile {
  std::string id;
  double center_x = 320.0;
  double top_y = 40.0;
  double scale = 1.0;
  double amplitude = 170.0;     ///< pixels
  double period_frames = 90.0;
  std::uint64_t seed = 0;
};

namespace synth {

/// Rest pose (x offset from body centre, y from top) at scale 1.
inline constexpr std::array<std::array<double, 2>, kNumBodyParts> kRestPose = {{
    {0, 100},    {0, 150},    {-45, 155},  {-75, 215}, {-60, 160}, {45, 155},  {75, 215},
    {60, 160},   {0, 330},    {-28, 330},  {-30, 450}, {-32, 560}, {28, 330},  {30, 450},
    {32, 560},   {-10, 90},   {10, 90},    {-22, 95},  {22, 95},   {40, 585},  {50, 582},
    {30, 570},   {-40, 585},  {-50, 582},  {-30, 570},
}};

inline constexpr double kElbowTravel = 0.85;  ///< elbow travel relative to the wrist

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double round_to(double v, double step) { return std::round(v / step) * step; }

/// Raised cosine: 0 at phase 0 and 1, peak 1 at phase 0.5.
inline double raised_cosine(double phase) { return 0.5 * (1.0 - std::cos(2.0 * M_PI * phase)); }

}  // namespace synth

inline std::vector<ParticipantProfile> make_participants(const SynthConfig& config) {
  config.validate();
  Rng rng(synth::mix(config.seed, 0x5eed));
  std::vector<ParticipantProfile> out;
  for (std::size_t i = 0; i < config.participants; ++i) {
    ParticipantProfile p;
    char id[16];
    std::snprintf(id, sizeof id, "P%03zu", i + 1);
    p.id = id;
    p.scale = rng.uniform(0.9, 1.1);
    p.center_x = rng.uniform(290.0, 350.0);
    p.top_y = rng.uniform(30.0, 60.0);
    p.amplitude = config.amplitude_px * p.scale *
                  rng.uniform(1.0 - config.amplitude_jitter, 1.0 + config.amplitude_jitter);
    p.period_frames = config.rep_period_s * config.fps *
                      rng.uniform(1.0 - config.period_jitter, 1.0 + config.period_jitter);
    p.seed = synth::mix(config.seed, i + 1);
    out.push_back(p);
  }
  return out;
}

/// One clip: still rest, reps_per_clip raised-cosine lifts, still rest.
/// Wrists and elbows carry the lift; the class sets its shape (see SynthConfig).
inline KeypointSequence generate_clip(ExerciseClass label, const ParticipantProfile& who,
                                      const SynthConfig& config) {
  config.validate();
  Rng rng(synth::mix(who.seed, static_cast<std::uint64_t>(label) + 101));

  std::vector<double> lift;  // 0 at rack, 1 at lockout, per frame
  const auto rest = static_cast<std::size_t>(std::lround(config.rest_s * config.fps));
  lift.assign(rest, 0.0);
  for (std::size_t r = 0; r < config.reps_per_clip; ++r) {
    const double period =
        who.period_frames * rng.uniform(1.0 - config.rep_jitter, 1.0 + config.rep_jitter);
    const auto n = std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(period)));
    for (std::size_t t = 0; t < n; ++t)
      lift.push_back(synth::raised_cosine(static_cast<double>(t) / static_cast<double>(n)));
  }
  lift.insert(lift.end(), rest, 0.0);

  double travel_right = who.amplitude, travel_left = who.amplitude, trough = 0.0;
  if (label == ExerciseClass::A) travel_left *= config.asymmetry_ratio;
  if (label == ExerciseClass::R) {
    trough = (1.0 - config.reduced_range_scale) * who.amplitude;
    travel_left = travel_right = config.reduced_range_scale * who.amplitude;
  }
  const double drift = label == ExerciseClass::Arch ? config.arch_drift_px * who.scale : 0.0;

  KeypointSequence seq;
  seq.participant_id = who.id;
  seq.clip_id = who.id + "_" + std::string(class_name(label));
  seq.label = label;
  seq.fps = config.fps;
  seq.frames.resize(lift.size());
  for (std::size_t f = 0; f < lift.size(); ++f) {
    auto& frame = seq.frames[f];
    frame.index = f;
    const double u = lift[f];
    for (std::size_t p = 0; p < kNumBodyParts; ++p) {
      double x = who.center_x + synth::kRestPose[p][0] * who.scale;
      double y = who.top_y + synth::kRestPose[p][1] * who.scale;
      const auto part = static_cast<BodyPart>(p);
      const bool right = part == BodyPart::RWrist || part == BodyPart::RElbow;
      const bool left = part == BodyPart::LWrist || part == BodyPart::LElbow;
      if (right || left) {
        const double travel = (right ? travel_right : travel_left) * u + trough;
        const bool elbow = part == BodyPart::RElbow || part == BodyPart::LElbow;
        y -= elbow ? synth::kElbowTravel * travel : travel;
      }
      if (part == BodyPart::MidHip || part == BodyPart::RHip || part == BodyPart::LHip) x += drift * u;
      x += rng.normal(0.0, config.noise_sd_px);
      y += rng.normal(0.0, config.noise_sd_px);
      const double conf = rng.uniform(config.min_confidence, config.max_confidence);
      frame.points[p] = {synth::round_to(x, 1e-3), synth::round_to(y, 1e-3),
                         std::min(1.0, synth::round_to(conf, 1e-4))};
    }
  }
  return seq;
}

struct SynthCorpus {
  std::vector<KeypointSequence> clips;
  std::vector<ClipMetadata> manifest;  ///< paths relative to the corpus root
};

/// Every participant performs every class once; clips are ordered
/// participant-major in class order N, A, R, Arch.
inline SynthCorpus generate_dataset(const SynthConfig& config) {
  SynthCorpus corpus;
  for (const auto& who : make_participants(config)) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      auto clip = generate_clip(static_cast<ExerciseClass>(k), who, config);
      corpus.manifest.push_back({clip.clip_id, clip.participant_id, clip.label, "clips/" + clip.clip_id, clip.fps});
      corpus.clips.push_back(std::move(clip));
    }
  }
  return corpus;
}

inline std::string frame_file_name(const std::string& clip_id, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%012zu_keypoints.json", index);
  return clip_id + buf;
}

inline std::string manifest_csv(const std::vector<ClipMetadata>& manifest) {
  std::string out = "clip_id,participant_id,class_label,path,fps\n";
  for (const auto& m : manifest) {
    char fps[32];
    std::snprintf(fps, sizeof fps, "%g", m.fps);
    out += m.clip_id + "," + m.participant_id + "," +
           (m.label ? std::string(class_name(*m.label)) : std::string()) + "," + m.path + "," + fps + "\n";
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

/// Writes one keypoint document per frame under <root>/clips/<clip_id>/ and
/// <root>/manifest.csv. Returns the manifest path.
inline std::filesystem::path write_corpus(const SynthCorpus& corpus, const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  for (std::size_t c = 0; c < corpus.clips.size(); ++c) {
    const auto dir = root / corpus.manifest[c].path;
    fs::create_directories(dir);
    for (const auto& frame : corpus.clips[c].frames)
      write_text(dir / frame_file_name(corpus.clips[c].clip_id, frame.index), serialize_frame(frame));
  }
  const auto manifest = root / "manifest.csv";
  write_text(manifest, manifest_csv(corpus.manifest));
  return manifest;
}

}  // namespace exmts
