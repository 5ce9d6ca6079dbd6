// Copyright (c) 2026 The tshn Authors. All Rights Reserved.
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

namespace tshn {

enum class ErrorCode {
  UnsupportedModulation,
  InvalidPair,
  UndefinedRow,
  InsufficientTrusted,
  ShapeError,
  GraphError,
  DegenerateVector,
  FaultReport,
  MissingClass,
  NotWarmedUp,
  UnknownSample,
  NeedTwoClasses,
  SegmentationError,
  EmptySplit,
  IoError,
  ConfigError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnsupportedModulation: return "UnsupportedModulation";
    case ErrorCode::InvalidPair: return "InvalidPair";
    case ErrorCode::UndefinedRow: return "UndefinedRow";
    case ErrorCode::InsufficientTrusted: return "InsufficientTrusted";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::GraphError: return "GraphError";
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::FaultReport: return "FaultReport";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::NotWarmedUp: return "NotWarmedUp";
    case ErrorCode::UnknownSample: return "UnknownSample";
    case ErrorCode::NeedTwoClasses: return "NeedTwoClasses";
    case ErrorCode::SegmentationError: return "SegmentationError";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }
  // Config/usage problems map to process exit code 2, everything else to 1.
  bool is_usage() const { return code_ == ErrorCode::ConfigError; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace tshn
