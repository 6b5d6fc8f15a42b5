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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "exmts/config.hpp"
#include "exmts/pose_ingest.hpp"
#include "oracles.hpp"

namespace exmts {
namespace fs = std::filesystem;
namespace {

std::string frame_document(const std::vector<std::vector<double>>& people) {
  nlohmann::json doc;
  doc["people"] = nlohmann::json::array();
  for (const auto& flat : people) doc["people"].push_back({{"pose_keypoints_2d", flat}});
  return doc.dump();
}

std::vector<double> flat_pose(double base, double conf = 0.9) {
  std::vector<double> flat;
  for (std::size_t p = 0; p < kNumBodyParts; ++p) {
    flat.push_back(base + 10.0 * static_cast<double>(p));
    flat.push_back(2.0 * base + static_cast<double>(p));
    flat.push_back(conf);
  }
  return flat;
}

KeypointArray pose_array(double base, double conf = 0.9) {
  const auto flat = flat_pose(base, conf);
  KeypointArray a{};
  for (std::size_t p = 0; p < kNumBodyParts; ++p) a[p] = {flat[3 * p], flat[3 * p + 1], flat[3 * p + 2]};
  return a;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("exmts_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                          ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(ParseFrame, MapsTriplesToBodyParts) {
  auto flat = flat_pose(1.0);
  flat[12] = 512.0;
  flat[13] = 300.5;
  flat[14] = 0.91;
  const auto f = parse_frame(frame_document({flat}), 7);
  EXPECT_EQ(f.index, 7u);
  EXPECT_EQ(f.points[index_of(BodyPart::RWrist)], (Keypoint{512.0, 300.5, 0.91}));
  EXPECT_EQ(body_part_name(4), "RWrist");
  EXPECT_EQ(f.points[0], (Keypoint{1.0, 2.0, 0.9}));
}

TEST(ParseFrame, ErrorCases) {
  auto kind_of = [](const std::string& doc) {
    try {
      parse_frame(doc);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind_of(R"({"people": []})"), ErrorKind::NoPersonDetected);
  auto short_flat = flat_pose(1.0);
  short_flat.pop_back();
  EXPECT_EQ(kind_of(frame_document({short_flat})), ErrorKind::MalformedDocument);
  EXPECT_EQ(kind_of("{not json"), ErrorKind::MalformedDocument);
  EXPECT_EQ(kind_of(R"({"version": 1.3})"), ErrorKind::MalformedDocument);
}

TEST(ParseFrame, FirstOfSeveralPeopleWithWarning) {
  std::vector<std::string> warnings;
  const auto f = parse_frame(frame_document({flat_pose(1.0), flat_pose(50.0)}), 0, &warnings);
  EXPECT_EQ(f.points[0].x, 1.0);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(ParseFrame, RoundTripsThroughSerialize) {
  Rng rng(4);
  KeypointFrame f;
  f.index = 3;
  for (auto& kp : f.points) kp = {rng.uniform(0.0, 1920.0), rng.uniform(0.0, 1080.0), rng.uniform()};
  EXPECT_EQ(parse_frame(serialize_frame(f), 3), f);
}

TEST(Assemble, PersonGapIsInterpolatedWithZeroConfidence) {
  std::vector<RawFrame> raw;
  for (std::size_t i = 0; i < 10; ++i) {
    if (i == 4)
      raw.push_back({i, std::nullopt});
    else
      raw.push_back({i, pose_array(static_cast<double>(i) * 3.0)});
  }
  const auto seq = assemble_sequence({"c", "p", ExerciseClass::N, "", 30.0}, raw);
  ASSERT_EQ(seq.frames.size(), 10u);
  for (std::size_t p = 0; p < kNumBodyParts; ++p) {
    const auto& mid = seq.frames[4].points[p];
    EXPECT_DOUBLE_EQ(mid.x, 0.5 * (seq.frames[3].points[p].x + seq.frames[5].points[p].x));
    EXPECT_DOUBLE_EQ(mid.y, 0.5 * (seq.frames[3].points[p].y + seq.frames[5].points[p].y));
    EXPECT_EQ(mid.confidence, 0.0);
  }
}

TEST(Assemble, InterpolatedValuesStayBetweenNeighbours) {
  Rng rng(8);
  std::vector<RawFrame> raw;
  for (std::size_t i = 0; i < 60; ++i) {
    KeypointArray a{};
    for (auto& kp : a) kp = {rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0), rng.coin() ? 0.0 : 0.8};
    raw.push_back({i, a});
  }
  const auto seq = assemble_sequence({"c", "p", std::nullopt, "", 30.0}, raw);
  for (std::size_t p = 0; p < kNumBodyParts; ++p)
    for (std::size_t i = 0; i < 60; ++i) {
      if ((*raw[i].points)[p].detected()) continue;
      std::optional<std::size_t> lo, hi;
      for (std::size_t j = i; j-- > 0;)
        if ((*raw[j].points)[p].detected()) {
          lo = j;
          break;
        }
      for (std::size_t j = i + 1; j < 60; ++j)
        if ((*raw[j].points)[p].detected()) {
          hi = j;
          break;
        }
      if (!lo || !hi) continue;
      const auto& a = (*raw[*lo].points)[p];
      const auto& b = (*raw[*hi].points)[p];
      const auto& v = seq.frames[i].points[p];
      EXPECT_GE(v.x, std::min(a.x, b.x));
      EXPECT_LE(v.x, std::max(a.x, b.x));
      EXPECT_GE(v.y, std::min(a.y, b.y));
      EXPECT_LE(v.y, std::max(a.y, b.y));
    }
}

TEST(Assemble, LongGapAndEmptyClip) {
  std::vector<RawFrame> raw;
  for (std::size_t i = 0; i < 40; ++i)
    raw.push_back({i, i >= 10 && i < 30 ? std::nullopt : std::optional<KeypointArray>(pose_array(1.0))});
  try {
    assemble_sequence({"gappy", "p", std::nullopt, "", 30.0}, raw, {15});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GapTooLarge);
    EXPECT_NE(std::string(e.what()).find("gappy"), std::string::npos);
  }
  EXPECT_NO_THROW(assemble_sequence({"gappy", "p", std::nullopt, "", 30.0}, raw, {20}));
  try {
    assemble_sequence({"none", "p", std::nullopt, "", 30.0}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyClip);
  }
}

TEST(LoadSequence, ReadsFrameFilesInIndexOrder) {
  TempDir dir;
  for (std::size_t i = 0; i < 300; ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "clip_%012zu_keypoints.json", i);
    std::ofstream(dir.path() / name) << (i == 150 ? R"({"people": []})" : frame_document({flat_pose(static_cast<double>(i))}));
  }
  const auto seq = load_sequence(dir.path(), {"clip", "p", ExerciseClass::R, dir.path().string(), 30.0});
  ASSERT_EQ(seq.frames.size(), 300u);
  for (std::size_t i = 0; i < 300; ++i) ASSERT_EQ(seq.frames[i].index, i);
  EXPECT_EQ(seq.frames[150].points[0].confidence, 0.0);
  EXPECT_DOUBLE_EQ(seq.frames[150].points[0].x, 150.0);
  try {
    load_sequence(dir.path() / "missing", {"gone", "p", std::nullopt, "", 30.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

KeypointSequence constant_sequence(std::size_t frames, double conf = 0.9) {
  KeypointSequence seq{"c", "p", ExerciseClass::N, {}, 30.0};
  for (std::size_t i = 0; i < frames; ++i) seq.frames.push_back({i, pose_array(static_cast<double>(i), conf)});
  return seq;
}

TEST(ExtractSeries, ShapesAndOrder) {
  const auto seq = constant_sequence(100);
  const auto s = extract_series(seq, {{4, 7}, false, true});
  EXPECT_EQ(s.num_channels(), 2u);
  EXPECT_EQ(s.length(), 100u);
  EXPECT_EQ(s.names(), (std::vector<std::string>{"RWrist_Y", "LWrist_Y"}));
  EXPECT_EQ(s.at(0, 10), seq.frames[10].points[4].y);
  const auto mp = extract_series(seq, ChannelSpec::military_press());
  EXPECT_EQ(mp.num_channels(), 16u);
  EXPECT_EQ(mp.names()[0], "RShoulder_X");
  EXPECT_EQ(mp.names()[1], "RShoulder_Y");
}

TEST(ExtractSeries, FrameStepLength) {
  const auto seq = constant_sequence(161);
  const auto s = extract_series(seq, ChannelSpec::military_press(), 3);
  EXPECT_EQ(s.length(), 54u);
  EXPECT_EQ(s.at(0, 53), seq.frames[159].points[2].x);
  for (std::size_t step = 1; step <= 9; ++step)
    EXPECT_EQ(extract_series(seq, {{0}, true, false}, step).length(), (161 + step - 1) / step);
  EXPECT_THROW(extract_series(seq, {{0}, true, false}, 0), Error);
  EXPECT_THROW(extract_series(seq, {{0, 0}, true, false}, 1), Error);
  EXPECT_THROW(extract_series(seq, {{25}, true, false}, 1), Error);
}

TEST(QualityGate, ThresholdCases) {
  auto seq = constant_sequence(50);
  EXPECT_TRUE(quality_gate(seq, ChannelSpec::military_press()).pass);
  for (auto& f : seq.frames) f.points[index_of(BodyPart::Nose)].confidence = 0.0;
  EXPECT_TRUE(quality_gate(seq, ChannelSpec::military_press()).pass);
  for (auto& f : seq.frames) f.points[index_of(BodyPart::RWrist)].confidence = 0.1;
  const auto r = quality_gate(seq, ChannelSpec::military_press());
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.mean_confidence[4], 0.1, 1e-12);
  EXPECT_FALSE(r.reasons.empty());
  auto sparse = constant_sequence(50);
  for (std::size_t i = 0; i < 15; ++i) sparse.frames[i].points[index_of(BodyPart::LHip)].confidence = 0.0;
  const auto s = quality_gate(sparse, ChannelSpec::military_press());
  EXPECT_FALSE(s.pass);
  EXPECT_DOUBLE_EQ(s.undetected_fraction[index_of(BodyPart::LHip)], 0.3);
}

TEST(Manifest, CsvAndJsonResolveRelativePaths) {
  TempDir dir;
  std::ofstream(dir.path() / "m.csv") << "clip_id,participant_id,class_label,path,fps\n"
                                       << "a,P1,N,clips/a,30\nb,P2,Arch,/abs/b,25\nc,P2,,clips/c,\n";
  const auto rows = read_manifest(dir.path() / "m.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].path, (dir.path() / "clips/a").string());
  EXPECT_EQ(rows[1].label, ExerciseClass::Arch);
  EXPECT_EQ(rows[1].path, "/abs/b");
  EXPECT_EQ(rows[1].fps, 25.0);
  EXPECT_FALSE(rows[2].label.has_value());
  std::ofstream(dir.path() / "m.json") << R"([{"clip_id": "a", "participant_id": "P1", "class_label": "R", "path": "x"}])";
  const auto j = read_manifest(dir.path() / "m.json");
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0].label, ExerciseClass::R);
  std::ofstream(dir.path() / "bad.csv") << "clip_id,participant_id,class_label,path\na,P1,Squat,x\n";
  EXPECT_THROW(read_manifest(dir.path() / "bad.csv"), Error);
  std::ofstream(dir.path() / "bad.json") << R"([{"clip_id": "a"}])";
  EXPECT_THROW(read_manifest(dir.path() / "bad.json"), Error);
}

TEST(Config, JsonRoundTripAndHashScope) {
  PipelineConfig c;
  c.frame_step = 3;
  c.length = 100;
  c.transform.kind = TransformKind::MiniRocket;
  c.channels = {{2, 4}, false, true};
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(preprocessing_hash(back), preprocessing_hash(c));
  auto other = c;
  other.normalize = true;
  other.transform.seed = 9;
  EXPECT_EQ(preprocessing_hash(other), preprocessing_hash(c));
  other.length = 161;
  EXPECT_NE(preprocessing_hash(other), preprocessing_hash(c));
  const auto named = config_from_json(nlohmann::json::parse(R"({"channels": {"parts": ["RWrist", 7], "axes": ["Y"]}})"));
  EXPECT_EQ(named.channels.parts, (std::vector<std::size_t>{4, 7}));
  EXPECT_FALSE(named.channels.use_x);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"frame_step": 0})")), Error);
}

}  // namespace
}  // namespace exmts
