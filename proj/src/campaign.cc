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

#include "catfuzz/campaign.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catfuzz/error.h"
#include "catfuzz/rng.h"
#include "catfuzz/suite.h"

#include <spdlog/spdlog.h>

namespace catfuzz {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// -- Ingest ----------------------------------------------------------------

json IngestResult::ReportJson() const {
  json dropped_json = json::array();
  for (const DroppedSeed& d : dropped) {
    dropped_json.push_back(json{{"line", d.line}, {"reason", d.reason}});
  }
  return json{{"seeds", db.inputs().size()},
              {"categories", db.lattice().size()},
              {"properties", db.catalog().size()},
              {"dropped", std::move(dropped_json)}};
}

IngestResult Ingest(const std::vector<std::string>& corpus_lines,
                    const CatalogConfig& config) {
  std::vector<Value> values;
  std::vector<DroppedSeed> dropped;
  for (size_t i = 0; i < corpus_lines.size(); ++i) {
    const std::string& line = corpus_lines[i];
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Value v = Decode(line);
      Materialize(v);
      values.push_back(std::move(v));
    } catch (const Error& e) {
      dropped.push_back(DroppedSeed{i + 1, e.what()});
    }
  }
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no usable seed in corpus");
  }
  Catalog catalog = InstantiateCatalog(values, config);
  return IngestResult{InputDatabase::Build(std::move(catalog), std::move(values)),
                      std::move(dropped)};
}

IngestResult IngestFile(const std::string& corpus_path,
                        const CatalogConfig& config) {
  std::ifstream in(corpus_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read corpus " + corpus_path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return Ingest(lines, config);
}

void WriteCorpus(const std::string& path, const std::vector<Value>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  for (const Value& v : values) out << Encode(v) << '\n';
}

// -- Targets ---------------------------------------------------------------

std::vector<TargetSignature> ParseTargets(
    const std::string& spec, const std::vector<std::string>& available) {
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  for (char ch : spec) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      items.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) items.push_back(cur);
  if (items.size() == 1 && items[0] == "all") items = available;

  std::vector<TargetSignature> out;
  for (const std::string& item : items) {
    TargetSignature sig;
    const size_t open = item.find('(');
    if (open != std::string::npos) {
      if (item.back() != ')') {
        throw Error(ErrorCode::kInvalidArgument, "bad target '" + item + "'");
      }
      sig.name = item.substr(0, open);
      std::stringstream params(item.substr(open + 1, item.size() - open - 2));
      for (std::string p; std::getline(params, p, ',');) {
        if (!p.empty()) sig.params.push_back(p);
      }
    } else {
      sig.name = item;
      const SyntheticTarget* t = FindSyntheticTarget(item, true);
      if (!t) {
        throw Error(ErrorCode::kInvalidArgument,
                    "no signature known for '" + item + "'; use name(p1,p2)");
      }
      sig.params = t->params;
    }
    if (sig.name.empty() || sig.params.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "bad target '" + item + "'");
    }
    out.push_back(std::move(sig));
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "no targets");
  return out;
}

std::string_view ModeName(CampaignMode mode) {
  switch (mode) {
    case CampaignMode::kFull: return "full";
    case CampaignMode::kNoLearning: return "no-learning";
    case CampaignMode::kRandomInputs: return "random-inputs";
  }
  return "?";
}

std::optional<CampaignMode> ParseMode(std::string_view name) {
  if (name == "full") return CampaignMode::kFull;
  if (name == "no-learning") return CampaignMode::kNoLearning;
  if (name == "random-inputs") return CampaignMode::kRandomInputs;
  return std::nullopt;
}

// -- Campaign --------------------------------------------------------------

struct Campaign::Driver {
  TargetSignature sig;
  Rng rng;
  std::vector<std::unique_ptr<Learner>> learners;
  size_t rotate = 0;
  std::optional<std::vector<size_t>> last_valid;
  size_t cases = 0;
  bool quarantined = false;
};

namespace {

uint64_t NameHash(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string TimingPath(const std::string& log_path) {
  return log_path + ".timing.jsonl";
}

}  // namespace

Campaign::Campaign(const InputDatabase* db, CampaignConfig config)
    : db_(db), config_(std::move(config)) {
  if (config_.budget_seconds <= 0) {
    throw Error(ErrorCode::kOutOfBudget, "campaign budget must be positive");
  }
  if (config_.targets.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "campaign has no targets");
  }
  if (config_.log_path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "campaign needs a log path");
  }
  if (db_->lattice().size() == 0) {
    throw Error(ErrorCode::kEmptyCorpus, "database has no categories");
  }
  if (config_.checkpoint_path.empty()) {
    config_.checkpoint_path = config_.log_path + ".ckpt";
  }
  config_.learner.Validate();
}

Campaign::~Campaign() = default;

void Campaign::InitDrivers() {
  drivers_.clear();
  for (const TargetSignature& sig : config_.targets) {
    auto d = std::make_unique<Driver>();
    d->sig = sig;
    const uint64_t seed = SplitMix64(config_.seed ^ NameHash(sig.name));
    d->rng = Rng(seed);
    if (config_.mode == CampaignMode::kFull) {
      for (size_t i = 0; i < sig.params.size(); ++i) {
        d->learners.push_back(std::make_unique<Learner>(
            &db_->lattice(), config_.learner, SplitMix64(seed + 1 + i)));
      }
    }
    drivers_.push_back(std::move(d));
  }
}

json Campaign::Header() const {
  json targets = json::array();
  for (const TargetSignature& t : config_.targets) {
    targets.push_back(json{{"name", t.name}, {"params", t.params}});
  }
  std::ostringstream digest;
  digest << std::hex << db_->catalog().digest();
  return json{{"version", 1},
              {"mode", std::string(ModeName(config_.mode))},
              {"seed", config_.seed},
              {"targets", std::move(targets)},
              {"catalog_digest", digest.str()},
              {"categories", db_->lattice().size()},
              {"inputs", db_->inputs().size()},
              {"learner", config_.learner.ToJson()},
              {"timeout_ms", config_.timeout_ms},
              {"per_function_cap", config_.per_function_cap},
              {"max_cases", config_.max_cases}};
}

TestCase Campaign::Plan(Driver& d, uint64_t case_id, LogRecord& record,
                        std::vector<std::pair<size_t, Query>>& issued) {
  const Lattice& lattice = db_->lattice();
  const size_t k = d.sig.params.size();
  record = LogRecord{};
  record.case_id = case_id;
  record.function = d.sig.name;
  record.param = "*";
  std::vector<size_t> inputs(k), cats(k);
  std::vector<bool> queried(k, false);

  if (config_.mode == CampaignMode::kNoLearning) {
    record.provenance = "no-learning";
    for (size_t i = 0; i < k; ++i) {
      cats[i] = d.rng.Uniform(lattice.size());
      inputs[i] = lattice.SampleInput(cats[i], d.rng.Next());
      queried[i] = true;
    }
  } else if (config_.mode == CampaignMode::kRandomInputs) {
    record.provenance = "random-inputs";
    for (size_t i = 0; i < k; ++i) {
      inputs[i] = d.rng.Uniform(db_->inputs().size());
      cats[i] = lattice.CategoryOfInput(inputs[i]);
      queried[i] = true;
    }
  } else {
    bool all_random = true;
    for (const auto& l : d.learners) all_random &= l->phase() == Phase::kRandom;
    if (all_random || !d.last_valid) {
      for (size_t i = 0; i < k; ++i) issued.emplace_back(i, d.learners[i]->Next());
      record.provenance = issued.front().second.provenance;
    } else {
      const size_t r = d.rotate++ % k;
      Learner& lead = *d.learners[r];
      record.param = d.sig.params[r];
      record.phase = lead.phase();
      if (lead.hypothesis()) record.hypothesis = lead.hypothesis()->category_ids;
      if (lead.phase() == Phase::kValidGeneration) {
        for (size_t i = 0; i < k; ++i) {
          if (d.learners[i]->phase() == Phase::kValidGeneration) {
            issued.emplace_back(i, d.learners[i]->Next());
          }
        }
      } else {
        issued.emplace_back(r, lead.Next());
      }
      for (const auto& [i, q] : issued) {
        if (i == r) {
          record.polarity = q.polarity;
          record.provenance = q.provenance;
        }
      }
    }
    for (size_t i = 0; i < k; ++i) {
      auto it = std::find_if(issued.begin(), issued.end(),
                             [i](const auto& e) { return e.first == i; });
      if (it != issued.end()) {
        cats[i] = it->second.category;
        inputs[i] = lattice.SampleInput(cats[i], d.rng.Next());
        queried[i] = true;
      } else {
        inputs[i] = (*d.last_valid)[i];
        cats[i] = lattice.CategoryOfInput(inputs[i]);
      }
    }
  }

  TestCase tc;
  tc.case_id = case_id;
  tc.function = d.sig.name;
  tc.timeout_ms = config_.timeout_ms;
  for (size_t i = 0; i < k; ++i) {
    record.args.push_back(LogArg{d.sig.params[i], inputs[i], cats[i], queried[i]});
    tc.args.push_back(
        CaseArg{d.sig.params[i], inputs[i], cats[i], db_->input(inputs[i]).value});
  }
  return tc;
}

void Campaign::Apply(Driver& d, const LogRecord& record,
                     const std::vector<std::pair<size_t, Query>>& issued,
                     const RunResult& result) {
  ++d.cases;
  if (!result.outcome) return;
  const OutcomeKind kind = result.outcome->kind;
  for (const auto& [i, q] : issued) d.learners[i]->Update(q, record.case_id, kind);
  if (kind == OutcomeKind::kValid) {
    std::vector<size_t> inputs;
    for (const LogArg& a : record.args) inputs.push_back(a.input);
    d.last_valid = std::move(inputs);
  }
}

void Campaign::SaveCheckpoint(uint64_t next_case, uint64_t timing_bytes) {
  json drivers = json::array();
  for (const auto& d : drivers_) {
    json learners = json::array();
    for (const auto& l : d->learners) learners.push_back(l->Checkpoint());
    drivers.push_back(json{{"name", d->sig.name},
                           {"rng", d->rng.SaveState()},
                           {"rotate", d->rotate},
                           {"cases", d->cases},
                           {"quarantined", d->quarantined},
                           {"last_valid", d->last_valid ? json(*d->last_valid)
                                                        : json(nullptr)},
                           {"learners", std::move(learners)}});
  }
  json ckpt{{"header", Header()},
            {"next_case", next_case},
            {"log_bytes", log_.bytes()},
            {"timing_bytes", timing_bytes},
            {"restart_counters", pool_->restart_counters()},
            {"drivers", std::move(drivers)}};
  const std::string tmp = config_.checkpoint_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << ckpt.dump() << '\n';
    if (!out) throw Error(ErrorCode::kIo, "cannot write checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, config_.checkpoint_path);
}

uint64_t Campaign::LoadCheckpoint() {
  std::ifstream in(config_.checkpoint_path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot read checkpoint " + config_.checkpoint_path);
  }
  json ckpt;
  try {
    ckpt = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("checkpoint: ") + e.what());
  }
  if (ckpt.at("header") != Header()) {
    throw Error(ErrorCode::kInvalidArgument,
                "checkpoint was written by a different campaign configuration");
  }
  const json& drivers = ckpt.at("drivers");
  for (size_t i = 0; i < drivers_.size(); ++i) {
    Driver& d = *drivers_[i];
    const json& j = drivers.at(i);
    d.rng.LoadState(j.at("rng").get<std::string>());
    d.rotate = j.at("rotate").get<size_t>();
    d.cases = j.at("cases").get<size_t>();
    d.quarantined = j.at("quarantined").get<bool>();
    if (!j.at("last_valid").is_null()) {
      d.last_valid = j.at("last_valid").get<std::vector<size_t>>();
    }
    for (size_t p = 0; p < d.learners.size(); ++p) {
      d.learners[p]->Restore(j.at("learners").at(p));
    }
  }
  pool_->RestoreCounters(
      ckpt.at("restart_counters").get<std::map<std::string, size_t>>());
  log_.Open(config_.log_path, ckpt.at("log_bytes").get<uint64_t>());
  timing_bytes_ = ckpt.at("timing_bytes").get<uint64_t>();
  std::filesystem::resize_file(TimingPath(config_.log_path), timing_bytes_);
  return ckpt.at("next_case").get<uint64_t>();
}

CampaignSummary Campaign::Run(bool resume) {
  pool_ = std::make_unique<WorkerPool>(config_.worker_argv, config_.workers,
                                       config_.timeout_ms, config_.restart_cap);
  InitDrivers();
  uint64_t next_case = 0;
  timing_bytes_ = 0;
  if (resume) {
    next_case = LoadCheckpoint();
  } else {
    log_.Open(config_.log_path, std::nullopt);
    log_.WriteHeader(Header());
    log_.Flush();
    std::ofstream(TimingPath(config_.log_path), std::ios::trunc);
    SaveCheckpoint(0, 0);
  }
  std::ofstream timing(TimingPath(config_.log_path),
                       std::ios::binary | std::ios::app);

  CampaignSummary summary;
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::milliseconds(
                  static_cast<int64_t>(config_.budget_seconds * 1000.0));
  uint64_t since_checkpoint = 0;
  // A round cut short by the deadline leaves learners with queries that were
  // never answered; resuming must start from the checkpoint before it.
  bool partial_round = false;
  for (;;) {
    if (Clock::now() >= deadline) {
      summary.budget_exhausted = true;
      break;
    }
    std::vector<Driver*> round;
    for (auto& d : drivers_) {
      if (!d->quarantined && d->cases < config_.per_function_cap) {
        round.push_back(d.get());
      }
    }
    if (config_.max_cases > 0) {
      const uint64_t left =
          next_case >= config_.max_cases ? 0 : config_.max_cases - next_case;
      if (round.size() > left) round.resize(left);
    }
    if (round.empty()) break;

    std::vector<TestCase> cases;
    std::vector<LogRecord> records(round.size());
    std::vector<std::vector<std::pair<size_t, Query>>> issued(round.size());
    for (size_t i = 0; i < round.size(); ++i) {
      cases.push_back(Plan(*round[i], next_case + i, records[i], issued[i]));
    }
    std::vector<RunResult> results = pool_->RunAll(cases, deadline);

    for (size_t i = 0; i < round.size(); ++i) {
      const RunResult& r = results[i];
      if (r.skipped) {
        summary.budget_exhausted = true;
        partial_round = true;
        continue;
      }
      LogRecord& rec = records[i];
      if (r.outcome) {
        rec.outcome = r.outcome->kind;
        rec.detail = r.outcome->detail;
      } else {
        rec.detail = r.incident;
        spdlog::warn("case {} discarded: {}", rec.case_id, r.incident);
      }
      Apply(*round[i], rec, issued[i], r);
      log_.Write(rec);
      std::string t = json{{"case", rec.case_id},
                           {"wall_ms", r.outcome ? r.outcome->wall_ms : 0.0}}
                          .dump() +
                      "\n";
      timing << t;
      timing_bytes_ += t.size();
      ++summary.cases;
    }
    next_case += round.size();
    for (Driver* d : round) {
      if (!d->quarantined && pool_->Quarantined(d->sig.name)) {
        d->quarantined = true;
        spdlog::warn("quarantined {} after repeated worker restarts", d->sig.name);
        log_.WriteEvent(json{{"event", "quarantine"},
                             {"function", d->sig.name},
                             {"next_case", next_case}});
      }
    }
    log_.Flush();
    timing.flush();
    since_checkpoint += round.size();
    if (summary.budget_exhausted) break;
    if (config_.checkpoint_every > 0 &&
        since_checkpoint >= config_.checkpoint_every) {
      SaveCheckpoint(next_case, timing_bytes_);
      since_checkpoint = 0;
    }
  }
  if (!partial_round) SaveCheckpoint(next_case, timing_bytes_);
  spdlog::info("campaign stopped after {} cases{}", summary.cases,
               summary.budget_exhausted ? " (budget exhausted)" : "");
  return summary;
}

// -- Replay ----------------------------------------------------------------

json Reproducer(const LogRecord& record, const InputDatabase& db,
                int timeout_ms) {
  json args = json::array();
  for (const LogArg& a : record.args) {
    args.push_back(json{{"param", a.param},
                        {"input", a.input},
                        {"category", a.category},
                        {"value", ToJson(db.input(a.input).value)}});
  }
  return json{{"case", record.case_id},
              {"function", record.function},
              {"timeout_ms", timeout_ms},
              {"args", std::move(args)}};
}

TestCase TestCaseFromReproducer(const json& j) {
  TestCase tc;
  try {
    tc.case_id = j.at("case").get<uint64_t>();
    tc.function = j.at("function").get<std::string>();
    tc.timeout_ms = j.at("timeout_ms").get<int>();
    for (const json& a : j.at("args")) {
      tc.args.push_back(CaseArg{a.at("param").get<std::string>(),
                                a.at("input").get<size_t>(),
                                a.at("category").get<size_t>(),
                                FromJson(a.at("value"))});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("reproducer: ") + e.what());
  }
  return tc;
}

RunResult ReplayCase(const ExecutionLog& log, const InputDatabase& db,
                     uint64_t case_id,
                     const std::vector<std::string>& worker_argv) {
  const LogRecord* rec = log.Find(case_id);
  if (!rec) {
    throw Error(ErrorCode::kInvalidArgument,
                "no case " + std::to_string(case_id) + " in log");
  }
  const int timeout = log.header.value("timeout_ms", kDefaultTimeoutMs);
  TestCase tc = TestCaseFromReproducer(Reproducer(*rec, db, timeout));
  Executor ex(worker_argv, timeout);
  return ex.Run(tc);
}

}  // namespace catfuzz
