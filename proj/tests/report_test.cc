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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catfuzz/campaign.h"
#include "catfuzz/log.h"
#include "catfuzz/report.h"
#include "catfuzz/suite.h"
#include "doctest.h"

namespace catfuzz {
namespace {

namespace fs = std::filesystem;

LogRecord Crash(uint64_t id, std::string function, std::string detail) {
  LogRecord r;
  r.case_id = id;
  r.function = std::move(function);
  r.param = "*";
  r.outcome = OutcomeKind::kCrash;
  r.detail = std::move(detail);
  return r;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("crashes group by function and signal") {
  ExecutionLog log;
  log.records = {Crash(7, "f", "SIGSEGV at a"), Crash(3, "f", "SIGSEGV at a"),
                 Crash(5, "g", "SIGSEGV at a"), Crash(9, "f", "SIGABRT at b")};
  const std::vector<CrashGroup> groups = DedupCrashes(log);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].function == "f");
  CHECK(groups[0].representative == 3);
  CHECK(groups[0].members == std::vector<uint64_t>{3, 7});
  CHECK(groups[1].function == "g");
  CHECK(groups[1].members == std::vector<uint64_t>{5});
  CHECK(groups[2].detail == "SIGABRT at b");

  log.records.push_back(Crash(11, "f", "SIGSEGV at a"));
  log.records.back().outcome = OutcomeKind::kInvalid;
  CHECK(DedupCrashes(log).size() == 3);
}

TEST_CASE("coverage metrics on a hand-built log") {
  const IngestResult in = Ingest(
      {Encode(Value::Int(3)), Encode(Value::Int(-2)), Encode(Value::String("s"))},
      CatalogConfig::Default());
  const InputDatabase& db = in.db;
  ExecutionLog log;
  log.header = {{"targets",
                 {{{"name", "f"}, {"params", {"x"}}}, {{"name", "g"}, {"params", {"y"}}}}}};
  auto rec = [](uint64_t id, std::string fn, size_t input, std::optional<OutcomeKind> o) {
    LogRecord r;
    r.case_id = id;
    r.function = std::move(fn);
    r.param = "*";
    r.args = {LogArg{"x", input, 0, true}};
    r.outcome = o;
    return r;
  };
  log.records = {rec(0, "f", 0, OutcomeKind::kValid), rec(1, "g", 0, OutcomeKind::kInvalid),
                 rec(2, "f", 1, OutcomeKind::kInvalid), rec(3, "g", 2, std::nullopt)};
  const Report rep = ComputeReport(log, db);
  // Input 2 only appears in a discarded case.
  const Bitset expected = db.input(0).fingerprint.bits | db.input(1).fingerprint.bits;
  CHECK(rep.covered_properties == expected.Count());
  CHECK(rep.catalog_size == db.catalog().size());
  CHECK(rep.property_coverage ==
        doctest::Approx(double(expected.Count()) / double(db.catalog().size())));
  CHECK(rep.functions == 2);
  CHECK(rep.functions_with_valid == 1);
  CHECK(rep.api_coverage == 0.5);
  CHECK(rep.cases == 3);
  CHECK(rep.valid == 1);
  CHECK(rep.outcomes.at("discarded") == 1);
  CHECK(rep.outcomes.at("invalid") == 2);
  CHECK(rep.phases.at("f").at("x") == "random");
}

TEST_CASE("category descriptions drop implied bounds") {
  const IngestResult in = Ingest({Encode(Value::Int(3)), Encode(Value::Int(-2))},
                                 CatalogConfig::Default());
  const std::string d = DescribeCategory(in.db, in.db.lattice().CategoryOfInput(0));
  CHECK(d.find("X == 3") != std::string::npos);
  CHECK(d.find("type(X) == int") != std::string::npos);
  CHECK(d.find("X > ") == std::string::npos);
  CHECK(d.find("X >= ") == std::string::npos);
  CHECK(d.find("is not None") == std::string::npos);
}

struct CampaignRun {
  InputDatabase db;
  ExecutionLog log;
};

const CampaignRun& Run() {
  static const CampaignRun run = [] {
    std::vector<std::string> lines;
    for (const Value& v : SeedCorpus()) lines.push_back(Encode(v));
    CampaignRun r{Ingest(lines, CatalogConfig::Default()).db, {}};
    const std::string log = (fs::temp_directory_path() / "catfuzz_report_test.jsonl").string();
    CampaignConfig c;
    for (const SyntheticTarget& t : SyntheticSuite()) {
      c.targets.push_back(TargetSignature{t.name, t.params});
    }
    c.budget_seconds = 600;
    c.timeout_ms = 2000;
    c.seed = 5;
    c.workers = 4;
    c.max_cases = 6000;
    c.worker_argv = {CATFUZZ_WORKER};
    c.log_path = log;
    Campaign(&r.db, c).Run();
    r.log = ExecutionLog::Read(log);
    return r;
  }();
  return run;
}

TEST_CASE("one crash group per planted predicate reached") {
  const CampaignRun& r = Run();
  std::set<std::pair<std::string, std::string>> reached;
  for (const LogRecord& rec : r.log.records) {
    if (rec.outcome != OutcomeKind::kCrash) continue;
    std::vector<Value> args;
    for (const LogArg& a : rec.args) args.push_back(r.db.input(a.input).value);
    const Prediction p = Predict(*FindSpec(rec.function), args);
    REQUIRE(p.kind == OutcomeKind::kCrash);
    reached.emplace(rec.function, p.site);
  }
  const std::vector<CrashGroup> groups = DedupCrashes(r.log);
  CHECK(groups.size() == reached.size());
  CHECK(groups.size() >= 5);
  size_t members = 0;
  for (const CrashGroup& g : groups) members += g.members.size();
  size_t crashes = 0;
  for (const LogRecord& rec : r.log.records) crashes += rec.outcome == OutcomeKind::kCrash;
  CHECK(members == crashes);
}

TEST_CASE("the report is a pure function of log and database") {
  const CampaignRun& r = Run();
  const Report a = ComputeReport(r.log, r.db);
  const Report b = ComputeReport(r.log, r.db);
  CHECK(a.ToJson().dump() == b.ToJson().dump());
  CHECK(a.ToText() == b.ToText());
  CHECK(a.cases == r.log.records.size());
  CHECK(a.functions == SyntheticSuite().size());
  for (const AcceptedHypothesis& h : a.accepted) {
    CHECK_FALSE(h.categories.empty());
    CHECK_FALSE(h.text.empty());
  }
}

int Sh(const std::string& cmd) {
  const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

TEST_CASE("command line: ingest, fuzz, report and repro agree") {
  const fs::path dir = fs::temp_directory_path() / "catfuzz_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = CATFUZZ_CLI;
  const std::string d = dir.string();
  REQUIRE(Sh(cli + " suite --write-corpus " + d + "/seeds.jsonl") == 0);
  REQUIRE(Sh(cli + " ingest --corpus " + d + "/seeds.jsonl --out " + d + "/db") == 0);
  CHECK(fs::exists(dir / "db" / "ingest_report.json"));
  CHECK(fs::exists(dir / "db" / "catalog_table.tsv"));
  const int rc = Sh(cli + " fuzz --db " + d + "/db --targets rank4_sum,safe_divide,fill" +
                    " --budget 120 --max-cases 600 --seed 3 --workers 2 --report " + d +
                    "/report.json");
  CHECK(rc == 2);
  CHECK(fs::exists(dir / "report.log.jsonl"));
  CHECK(fs::exists(dir / "report.json.txt"));
  REQUIRE(Sh(cli + " report --log " + d + "/report.log.jsonl --db " + d +
             "/db --out " + d + "/again.json") == 0);
  CHECK(Slurp(d + "/again.json") == Slurp(d + "/report.json"));

  const nlohmann::json rep = nlohmann::json::parse(Slurp(d + "/report.json"));
  REQUIRE_FALSE(rep.at("crash_groups").empty());
  const uint64_t id = rep["crash_groups"][0]["representative"].get<uint64_t>();
  CHECK(Sh(cli + " repro --case " + std::to_string(id) + " --log " + d +
           "/report.log.jsonl --db " + d + "/db") == 2);
  const fs::path repro = dir / "report.json.repro" / ("crash_" + std::to_string(id) + ".json");
  CHECK(fs::exists(repro));
  CHECK(Sh(cli + " repro --file " + repro.string()) == 2);

  CHECK(Sh(cli + " fuzz --db " + d + "/missing --report " + d + "/x.json") == 1);
  CHECK(Sh(cli + " fuzz --db " + d + "/db --mode sideways --report " + d + "/x.json") == 1);
}

}  // namespace
}  // namespace catfuzz
