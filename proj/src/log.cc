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

#include "catfuzz/log.h"

#include <filesystem>
#include <sstream>

#include "catfuzz/error.h"

namespace catfuzz {

using nlohmann::json;

namespace {

template <typename T>
T Require(std::optional<T> v, const std::string& what) {
  if (!v) throw Error(ErrorCode::kParse, "bad " + what + " in log");
  return *v;
}

}  // namespace

json RecordToJson(const LogRecord& r) {
  json args = json::array();
  for (const LogArg& a : r.args) {
    args.push_back(json{{"param", a.param},
                        {"input", a.input},
                        {"category", a.category},
                        {"queried", a.queried}});
  }
  json j{{"type", "case"},
         {"case", r.case_id},
         {"function", r.function},
         {"param", r.param},
         {"args", std::move(args)},
         {"phase", std::string(PhaseName(r.phase))},
         {"polarity", std::string(PolarityName(r.polarity))},
         {"provenance", r.provenance},
         {"outcome", r.outcome ? std::string(OutcomeName(*r.outcome))
                               : std::string("discarded")},
         {"detail", r.detail}};
  if (!r.hypothesis.empty()) j["hypothesis"] = r.hypothesis;
  return j;
}

LogRecord RecordFromJson(const json& j) {
  LogRecord r;
  try {
    r.case_id = j.at("case").get<uint64_t>();
    r.function = j.at("function").get<std::string>();
    r.param = j.at("param").get<std::string>();
    for (const json& a : j.at("args")) {
      r.args.push_back(LogArg{a.at("param").get<std::string>(),
                              a.at("input").get<size_t>(),
                              a.at("category").get<size_t>(),
                              a.at("queried").get<bool>()});
    }
    r.phase = Require(ParsePhase(j.at("phase").get<std::string>()), "phase");
    r.polarity =
        Require(ParsePolarity(j.at("polarity").get<std::string>()), "polarity");
    r.provenance = j.at("provenance").get<std::string>();
    const std::string outcome = j.at("outcome").get<std::string>();
    if (outcome != "discarded") r.outcome = Require(ParseOutcome(outcome), "outcome");
    r.detail = j.at("detail").get<std::string>();
    if (j.contains("hypothesis")) {
      r.hypothesis = j.at("hypothesis").get<std::vector<size_t>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("log record: ") + e.what());
  }
  return r;
}

ExecutionLog ExecutionLog::Read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read log " + path);
  ExecutionLog log;
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse,
                  path + ":" + std::to_string(n) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      log.header = std::move(j);
    } else if (type == "case") {
      log.records.push_back(RecordFromJson(j));
    } else if (type == "event") {
      log.events.push_back(std::move(j));
    } else {
      throw Error(ErrorCode::kParse,
                  path + ":" + std::to_string(n) + ": unknown line type");
    }
  }
  if (log.header.is_null()) throw Error(ErrorCode::kParse, path + ": no header");
  return log;
}

const LogRecord* ExecutionLog::Find(uint64_t case_id) const {
  for (const LogRecord& r : records) {
    if (r.case_id == case_id) return &r;
  }
  return nullptr;
}

void LogWriter::Open(const std::string& path,
                     std::optional<uint64_t> keep_bytes) {
  namespace fs = std::filesystem;
  if (fs::path(path).has_parent_path()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  if (keep_bytes) {
    if (!fs::exists(path) || fs::file_size(path) < *keep_bytes) {
      throw Error(ErrorCode::kIo, path + " is shorter than its checkpoint");
    }
    fs::resize_file(path, *keep_bytes);
    out_.open(path, std::ios::binary | std::ios::app);
    bytes_ = *keep_bytes;
  } else {
    out_.open(path, std::ios::binary | std::ios::trunc);
    bytes_ = 0;
  }
  if (!out_) throw Error(ErrorCode::kIo, "cannot write " + path);
}

void LogWriter::Line(const std::string& s) {
  out_ << s << '\n';
  bytes_ += s.size() + 1;
}

void LogWriter::WriteHeader(const json& header) {
  json h = header;
  h["type"] = "header";
  Line(h.dump());
}

void LogWriter::Write(const LogRecord& r) { Line(RecordToJson(r).dump()); }

void LogWriter::WriteEvent(const json& event) {
  json e = event;
  e["type"] = "event";
  Line(e.dump());
}

void LogWriter::Flush() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "log write failed");
}

}  // namespace catfuzz
