// Copyright 2026 The Arena Authors.
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

#ifndef ARENA_ERROR_H_
#define ARENA_ERROR_H_

#include <stdexcept>
#include <string>

namespace arena {

enum class ErrorCode {
  kInvalidArgument,
  kSchema,          // malformed input record
  kValidation,      // well-formed but violates a domain invariant
  kNotFound,
  kConnectivity,    // comparison graph is disconnected
  kNonConvergence,  // optimizer did not converge (e.g. separation)
  kUndefined,       // statistic undefined for the given input
  kConflict,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arena

#endif  // ARENA_ERROR_H_
