// Copyright 2026 The mask2mm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace mask2mm {

enum class ErrorKind {
  kParse,
  kValidation,
  kIo,
  kNoIntersection,
  kDegenerateQuad,
  kProjection,
  kInsufficientBricks,
  kInsufficientLines,
  kNoAnchorBricks,
  kScaleMismatch,
  kNoCracks,
  kDivisionByZero,
  kAlignment,
  kOutOfBounds,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mask2mm
