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

#ifndef CATFUZZ_LOG_H_
#define CATFUZZ_LOG_H_

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "catfuzz/outcome.h"
#include "json.hpp"

namespace catfuzz {

struct LogArg {
  std::string param;
  size_t input = 0;
  size_t category = 0;
  bool queried = false;  // false when pinned to an earlier valid input
};

// One executed (or discarded) case. `param` is "*" when every parameter
// was queried jointly.
struct LogRecord {
  uint64_t case_id = 0;
  std::string function;
  std::string param;
  std::vector<LogArg> args;
  Phase phase = Phase::kRandom;
  Polarity polarity = Polarity::kExploratory;
  std::string provenance;
  std::optional<OutcomeKind> outcome;  // empty when discarded
  std::string detail;
  std::vector<size_t> hypothesis;
};

nlohmann::json RecordToJson(const LogRecord& r);
LogRecord RecordFromJson(const nlohmann::json& j);

// Parsed log file: a header line, then case and event lines.
struct ExecutionLog {
  nlohmann::json header;
  std::vector<LogRecord> records;
  std::vector<nlohmann::json> events;

  static ExecutionLog Read(const std::string& path);  // throws kIo / kParse
  const LogRecord* Find(uint64_t case_id) const;
};

// Appends canonical lines; flushes after every batch.
class LogWriter {
 public:
  LogWriter() = default;
  // Truncates to `keep_bytes` first when given, else starts empty.
  void Open(const std::string& path, std::optional<uint64_t> keep_bytes);
  void WriteHeader(const nlohmann::json& header);
  void Write(const LogRecord& r);
  void WriteEvent(const nlohmann::json& event);
  void Flush();
  uint64_t bytes() const { return bytes_; }

 private:
  void Line(const std::string& s);

  std::ofstream out_;
  uint64_t bytes_ = 0;
};

}  // namespace catfuzz

#endif  // CATFUZZ_LOG_H_
