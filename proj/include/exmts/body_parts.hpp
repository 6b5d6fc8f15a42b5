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
#include <cstddef>
#include <optional>
#include <string_view>

namespace exmts {

inline constexpr std::size_t kNumBodyParts = 25;

/// Body-part indices of the 25-keypoint pose model, in output order.
enum class BodyPart : std::size_t {
  Nose = 0,
  Neck = 1,
  RShoulder = 2,
  RElbow = 3,
  RWrist = 4,
  LShoulder = 5,
  LElbow = 6,
  LWrist = 7,
  MidHip = 8,
  RHip = 9,
  RKnee = 10,
  RAnkle = 11,
  LHip = 12,
  LKnee = 13,
  LAnkle = 14,
  REye = 15,
  LEye = 16,
  REar = 17,
  LEar = 18,
  LBigToe = 19,
  LSmallToe = 20,
  LHeel = 21,
  RBigToe = 22,
  RSmallToe = 23,
  RHeel = 24,
};

inline constexpr std::array<std::string_view, kNumBodyParts> kBodyPartNames = {
    "Nose",   "Neck",  "RShoulder", "RElbow",  "RWrist",  "LShoulder", "LElbow",
    "LWrist", "MidHip", "RHip",     "RKnee",   "RAnkle",  "LHip",      "LKnee",
    "LAnkle", "REye",  "LEye",      "REar",    "LEar",    "LBigToe",   "LSmallToe",
    "LHeel",  "RBigToe", "RSmallToe", "RHeel"};

constexpr std::size_t index_of(BodyPart p) { return static_cast<std::size_t>(p); }

constexpr std::string_view body_part_name(std::size_t index) { return kBodyPartNames.at(index); }

inline std::optional<std::size_t> body_part_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumBodyParts; ++i)
    if (kBodyPartNames[i] == name) return i;
  return std::nullopt;
}

/// Exercise classes for the Military Press: normal, asymmetric bar,
/// reduced range of motion, arched back.
enum class ExerciseClass : int { N = 0, A = 1, R = 2, Arch = 3 };

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {"N", "A", "R", "Arch"};

constexpr std::string_view class_name(ExerciseClass c) { return kClassNames[static_cast<int>(c)]; }

inline std::optional<ExerciseClass> parse_class(std::string_view name) {
  for (std::size_t i = 0; i < kNumClasses; ++i)
    if (kClassNames[i] == name) return static_cast<ExerciseClass>(i);
  return std::nullopt;
}

}  // namespace exmts
