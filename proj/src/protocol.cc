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

#include "catfuzz/protocol.h"

#include <iostream>

#include "catfuzz/error.h"

namespace catfuzz {

using nlohmann::json;

std::string EncodeRequest(const Request& r) {
  json j{{"id", r.id}, {"op", r.op}};
  if (r.op == "invoke") {
    j["function"] = r.function;
    json args = json::array();
    for (const Value& v : r.args) args.push_back(ToJson(v));
    j["args"] = std::move(args);
  }
  return j.dump();
}

Request DecodeRequest(std::string_view line) {
  Request r;
  try {
    json j = json::parse(line);
    r.id = j.at("id").get<int64_t>();
    r.op = j.at("op").get<std::string>();
    if (r.op == "invoke") {
      r.function = j.at("function").get<std::string>();
      for (const json& a : j.at("args")) r.args.push_back(FromJson(a));
    } else if (r.op != "ping" && r.op != "list_functions") {
      throw Error(ErrorCode::kParse, "unknown op '" + r.op + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return r;
}

std::string EncodeResponse(const Response& r) {
  json j{{"id", r.id}, {"result", r.result}};
  if (r.result == "exception") {
    j["class"] = r.cls;
    j["message"] = r.message;
  } else if (r.result == "functions") {
    j["names"] = r.names;
  } else if (r.result == "error") {
    j["message"] = r.message;
  }
  return j.dump();
}

Response DecodeResponse(std::string_view line) {
  Response r;
  try {
    json j = json::parse(line);
    r.id = j.at("id").get<int64_t>();
    r.result = j.at("result").get<std::string>();
    if (r.result == "exception") {
      r.cls = j.at("class").get<std::string>();
      r.message = j.at("message").get<std::string>();
    } else if (r.result == "functions") {
      r.names = j.at("names").get<std::vector<std::string>>();
    } else if (r.result == "error") {
      r.message = j.value("message", "");
    } else if (r.result != "ok" && r.result != "pong") {
      throw Error(ErrorCode::kParse, "unknown result '" + r.result + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return r;
}

Response Serve(const Request& request,
               const std::vector<SyntheticTarget>& targets) {
  Response r;
  r.id = request.id;
  if (request.op == "ping") {
    r.result = "pong";
    return r;
  }
  if (request.op == "list_functions") {
    r.result = "functions";
    for (const SyntheticTarget& t : targets) r.names.push_back(t.name);
    return r;
  }
  r.result = "exception";
  const SyntheticTarget* target = nullptr;
  for (const SyntheticTarget& t : targets) {
    if (t.name == request.function) target = &t;
  }
  if (!target) {
    r.cls = kUnknownFunctionClass;
    r.message = request.function;
    return r;
  }
  if (request.args.size() != target->params.size()) {
    r.cls = "TypeError";
    r.message = request.function + " takes " +
                std::to_string(target->params.size()) + " arguments";
    return r;
  }
  std::vector<Materialized> args;
  for (const Value& v : request.args) {
    try {
      args.push_back(Materialize(v));
    } catch (const Error& e) {
      r.cls = kSetupErrorClass;
      r.message = e.what();
      return r;
    }
  }
  try {
    target->invoke(args);
  } catch (const TargetException& e) {
    r.cls = e.cls();
    r.message = e.what();
    return r;
  }
  r.result = "ok";
  return r;
}

void ServeLoop(std::istream& in, std::ostream& out,
               const std::vector<SyntheticTarget>& targets) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Response r;
    try {
      r = Serve(DecodeRequest(line), targets);
    } catch (const Error& e) {
      r.id = -1;
      try {
        r.id = json::parse(line).at("id").get<int64_t>();
      } catch (const json::exception&) {
      }
      r.result = "error";
      r.message = e.what();
    }
    out << EncodeResponse(r) << '\n';
    out.flush();
  }
}

}  // namespace catfuzz
