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

#include <stdexcept>
#include <string>
#include <string_view>

namespace exmts {

/// Failure categories raised by the library. Each maps to a process exit code
/// in the CLI (see exit_code()).
enum class ErrorKind {
  InvalidParams,
  MalformedDocument,
  NoPersonDetected,
  EmptyClip,
  GapTooLarge,
  NoRepetitionsFound,
  TooShort,
  DegenerateDataset,
  ShapeMismatch,
  EmptyDataset,
  TooFewSamples,
  DegenerateLabels,
  NumericalFailure,
  TooFewParticipants,
  LengthMismatch,
  FormatError,
  ConfigMismatch,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::NoPersonDetected: return "NoPersonDetected";
    case ErrorKind::EmptyClip: return "EmptyClip";
    case ErrorKind::GapTooLarge: return "GapTooLarge";
    case ErrorKind::NoRepetitionsFound: return "NoRepetitionsFound";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::DegenerateDataset: return "DegenerateDataset";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::TooFewParticipants: return "TooFewParticipants";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// CLI exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return 1;
    case ErrorKind::NumericalFailure: return 3;
    default: return 2;
  }
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace exmts
