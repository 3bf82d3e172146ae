// Copyright 2026 The Catfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATFUZZ_ERROR_H_
#define CATFUZZ_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace catfuzz {

enum class ErrorCode {
  kDepthExceeded,
  kInvalidValue,
  kUnsupportedValue,
  kParse,
  kEmptyCorpus,
  kInvalidCatalogConfig,
  kMixedCatalog,
  kEmptyHistory,
  kNoValidRecord,
  kWorkerRestartFailure,
  kProtocolDesync,
  kWorkerPoolFailure,
  kOutOfBudget,
  kInvalidArgument,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All engine failures surface as this exception; `code()` lets callers
// branch on the failure class without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace catfuzz

#endif  // CATFUZZ_ERROR_H_
