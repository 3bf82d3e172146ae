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

#ifndef CATFUZZ_PROTOCOL_H_
#define CATFUZZ_PROTOCOL_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "catfuzz/suite.h"
#include "catfuzz/value.h"

namespace catfuzz {

// One line of the worker wire protocol, engine to worker.
struct Request {
  int64_t id = 0;
  std::string op;  // "invoke" | "ping" | "list_functions"
  std::string function;
  std::vector<Value> args;
};

// One line of the worker wire protocol, worker to engine.
struct Response {
  int64_t id = 0;
  std::string result;  // "ok" | "exception" | "pong" | "functions" | "error"
  std::string cls;
  std::string message;
  std::vector<std::string> names;
};

// Reserved exception classes.
inline constexpr std::string_view kSetupErrorClass = "SetupError";
inline constexpr std::string_view kUnknownFunctionClass = "UnknownFunction";

std::string EncodeRequest(const Request& r);
Request DecodeRequest(std::string_view line);  // throws kParse
std::string EncodeResponse(const Response& r);
Response DecodeResponse(std::string_view line);  // throws kParse

// Answers one request against `targets`. Planted crashes terminate the
// process from inside this call.
Response Serve(const Request& request,
               const std::vector<SyntheticTarget>& targets);

// Request loop over line-delimited streams; returns at end of input.
void ServeLoop(std::istream& in, std::ostream& out,
               const std::vector<SyntheticTarget>& targets);

}  // namespace catfuzz

#endif  // CATFUZZ_PROTOCOL_H_
