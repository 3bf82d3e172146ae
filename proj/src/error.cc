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

#include "catfuzz/error.h"

namespace catfuzz {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDepthExceeded: return "depth-exceeded";
    case ErrorCode::kInvalidValue: return "invalid-value";
    case ErrorCode::kUnsupportedValue: return "unsupported-value";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kEmptyCorpus: return "empty-corpus";
    case ErrorCode::kInvalidCatalogConfig: return "invalid-catalog-config";
    case ErrorCode::kMixedCatalog: return "mixed-catalog";
    case ErrorCode::kEmptyHistory: return "empty-history";
    case ErrorCode::kNoValidRecord: return "no-valid-record";
    case ErrorCode::kWorkerRestartFailure: return "worker-restart-failure";
    case ErrorCode::kProtocolDesync: return "protocol-desync";
    case ErrorCode::kWorkerPoolFailure: return "worker-pool-failure";
    case ErrorCode::kOutOfBudget: return "out-of-budget";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace catfuzz
