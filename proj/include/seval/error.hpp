// seval/error.hpp

// Copyright 2026  The seval authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEVAL_ERROR_HPP_
#define SEVAL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace seval {

enum class ErrorCode {
  kMalformedFile,
  kUnsupportedEncoding,
  kEmptyAudio,
  kIoError,
  kSilentInput,
  kInputTooShort,
  kNonColaConfig,
  kDegenerateFrame,
  kLengthMismatch,
  kDimensionMismatch,
  kCompressedMask,
  kAlreadyCompressed,
  kUncompressedInput,
  kOutOfDomain,
  kTooShort,
  kNoActiveSpeech,
  kEmptyRegion,
  kMissingPair,
  kConfigInvalid,
  kEmptyPool,
  kKindMismatch,
  kUndefinedBaseline,
  kNoValidFrames,
  kInvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kEmptyAudio: return "EmptyAudio";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSilentInput: return "SilentInput";
    case ErrorCode::kInputTooShort: return "InputTooShort";
    case ErrorCode::kNonColaConfig: return "NonColaConfig";
    case ErrorCode::kDegenerateFrame: return "DegenerateFrame";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCompressedMask: return "CompressedMask";
    case ErrorCode::kAlreadyCompressed: return "AlreadyCompressed";
    case ErrorCode::kUncompressedInput: return "UncompressedInput";
    case ErrorCode::kOutOfDomain: return "OutOfDomain";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kNoActiveSpeech: return "NoActiveSpeech";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kKindMismatch: return "KindMismatch";
    case ErrorCode::kUndefinedBaseline: return "UndefinedBaseline";
    case ErrorCode::kNoValidFrames: return "NoValidFrames";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace seval

#endif  // SEVAL_ERROR_HPP_
