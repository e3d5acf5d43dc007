//
// Copyright 2026 The wmcollide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef WMCOLLIDE_ERROR_H_
#define WMCOLLIDE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace wmcollide {

enum class ErrorCode {
  kIoError,
  kCorpusEmpty,
  kCorpusTooSmall,
  kBadConfig,
  kNumericalError,
  kTooShort,
  kCalibrationError,
  kFormatError,
  kFilterExhausted,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception. The code is stable and is
// what callers (and the CLI exit path) branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }

  // Same code, message prefixed with where it happened.
  Error WithContext(const std::string& context) const {
    return Error(code_, context + ": " + message_);
  }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace wmcollide

#endif  // WMCOLLIDE_ERROR_H_
