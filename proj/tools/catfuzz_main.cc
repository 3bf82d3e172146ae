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

// Command-line entry point.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "catfuzz/campaign.h"
#include "catfuzz/error.h"
#include "catfuzz/report.h"
#include "catfuzz/suite.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCrashes = 2;

void SetupLogging() {
  auto logger = spdlog::stderr_color_mt("catfuzz");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("CF_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

fs::path SelfDir() {
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  return ec ? fs::current_path() : exe.parent_path();
}

std::vector<std::string> WorkerArgv(const std::string& harness, bool faults) {
  std::vector<std::string> argv;
  if (!harness.empty()) {
    std::istringstream words(harness);
    for (std::string w; words >> w;) argv.push_back(w);
    return argv;
  }
  argv.push_back((SelfDir() / "catfuzz-worker").string());
  if (faults) argv.push_back("--faults");
  return argv;
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw catfuzz::Error(catfuzz::ErrorCode::kIo, "cannot write " + path.string());
  }
  out << text;
}

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw catfuzz::Error(catfuzz::ErrorCode::kIo, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw catfuzz::Error(catfuzz::ErrorCode::kParse, path + ": " + e.what());
  }
}

void WriteReproducers(const catfuzz::Report& report,
                      const catfuzz::ExecutionLog& log,
                      const catfuzz::InputDatabase& db, const fs::path& dir) {
  const int timeout = log.header.value("timeout_ms", catfuzz::kDefaultTimeoutMs);
  for (const catfuzz::CrashGroup& g : report.crash_groups) {
    const catfuzz::LogRecord* rec = log.Find(g.representative);
    json repro = catfuzz::Reproducer(*rec, db, timeout);
    repro["detail"] = g.detail;
    WriteText(dir / ("crash_" + std::to_string(g.representative) + ".json"),
              repro.dump(1) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  SetupLogging();
  CLI::App app{"catfuzz: API fuzzing with category-based constraint learning"};
  app.require_subcommand(1);

  // ingest
  std::string corpus, catalog_path, db_out;
  auto* ingest = app.add_subcommand("ingest", "Build the input database from a seed corpus");
  ingest->add_option("--corpus", corpus, "Seed corpus (one Value per line)")->required();
  ingest->add_option("--catalog", catalog_path, "Catalog config file");
  ingest->add_option("--out", db_out, "Database directory")->required();

  // fuzz
  std::string db_dir, targets = "all", report_path, log_path, harness, mode = "full";
  std::string learner_path;
  double budget = 3600;
  uint64_t seed = 0;
  size_t workers = 1, max_cases = 0, per_function_cap = 1000;
  int timeout_ms = catfuzz::kDefaultTimeoutMs;
  bool synthetic = false, faults = false, resume = false;
  auto* fuzz = app.add_subcommand("fuzz", "Run a fuzzing campaign");
  fuzz->add_option("--db", db_dir, "Database directory")->required();
  fuzz->add_option("--targets", targets, "all, or name[(p1,p2)],...");
  fuzz->add_option("--budget", budget, "Wall-clock budget in seconds");
  fuzz->add_option("--seed", seed, "Campaign seed");
  fuzz->add_option("--workers", workers, "Worker processes");
  fuzz->add_option("--report", report_path, "Report path (JSON)")->required();
  fuzz->add_option("--log", log_path, "Execution log (default: next to report)");
  auto* harness_opt = fuzz->add_option("--harness", harness, "Worker command line");
  fuzz->add_flag("--synthetic", synthetic, "Use the built-in synthetic worker")
      ->excludes(harness_opt);
  fuzz->add_flag("--faults", faults, "Expose fault-injection targets");
  fuzz->add_option("--mode", mode, "full | no-learning | random-inputs");
  fuzz->add_option("--max-cases", max_cases, "Global case cap (0: none)");
  fuzz->add_option("--per-function-cap", per_function_cap, "Cases per function");
  fuzz->add_option("--timeout-ms", timeout_ms, "Per-case deadline");
  fuzz->add_option("--learner-config", learner_path, "Learner config JSON");
  fuzz->add_flag("--resume", resume, "Continue from the log's checkpoint");

  // report
  std::string report_log, report_db, report_out;
  auto* report = app.add_subcommand("report", "Recompute the report from a log");
  report->add_option("--log", report_log, "Execution log")->required();
  report->add_option("--db", report_db, "Database directory")->required();
  report->add_option("--out", report_out, "Also write the JSON report here");

  // repro
  uint64_t repro_case = 0;
  std::string repro_log, repro_db, repro_file, repro_harness;
  bool repro_faults = false;
  auto* repro = app.add_subcommand("repro", "Re-execute a logged case");
  auto* case_opt = repro->add_option("--case", repro_case, "Case id");
  repro->add_option("--log", repro_log, "Execution log")->needs(case_opt);
  repro->add_option("--db", repro_db, "Database directory")->needs(case_opt);
  repro->add_option("--file", repro_file, "Reproducer JSON")->excludes(case_opt);
  repro->add_option("--harness", repro_harness, "Worker command line");
  repro->add_flag("--faults", repro_faults, "Expose fault-injection targets");

  // suite
  std::string suite_corpus;
  auto* suite = app.add_subcommand("suite", "Synthetic suite utilities");
  suite->add_option("--write-corpus", suite_corpus, "Write the 200-seed corpus");
  bool suite_spec = false;
  suite->add_flag("--spec", suite_spec, "Print the ground-truth spec");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      catfuzz::CatalogConfig config = catalog_path.empty()
                                          ? catfuzz::CatalogConfig::Default()
                                          : catfuzz::CatalogConfig::Load(catalog_path);
      catfuzz::IngestResult r = catfuzz::IngestFile(corpus, config);
      r.db.Save(db_out);
      WriteText(fs::path(db_out) / "ingest_report.json", r.ReportJson().dump(1) + "\n");
      WriteText(fs::path(db_out) / "catalog_table.tsv", r.db.catalog().ReportTable());
      std::cout << "seeds " << r.db.inputs().size() << ", dropped " << r.dropped.size()
                << ", properties " << r.db.catalog().size() << ", categories "
                << r.db.lattice().size() << "\n";
      if (r.db.lattice().size() == 1) {
        std::cout << "note: one category only; no negative queries are possible\n";
      }
      return kExitOk;
    }

    if (*fuzz) {
      catfuzz::InputDatabase db = catfuzz::InputDatabase::Load(db_dir);
      catfuzz::CampaignConfig config;
      auto m = catfuzz::ParseMode(mode);
      if (!m) throw catfuzz::Error(catfuzz::ErrorCode::kInvalidArgument, "bad --mode " + mode);
      config.mode = *m;
      config.worker_argv = WorkerArgv(harness, faults);
      std::vector<std::string> available;
      if (targets == "all") {
        catfuzz::Executor probe(config.worker_argv, timeout_ms);
        available = probe.ListFunctions();
      }
      config.targets = catfuzz::ParseTargets(targets, available);
      config.budget_seconds = budget;
      config.seed = seed;
      config.workers = workers;
      config.max_cases = max_cases;
      config.per_function_cap = per_function_cap;
      config.timeout_ms = timeout_ms;
      if (!learner_path.empty()) {
        config.learner = catfuzz::LearnerConfig::FromJson(ReadJson(learner_path));
      }
      const fs::path report_file(report_path);
      config.log_path = log_path.empty()
                            ? fs::path(report_file).replace_extension(".log.jsonl").string()
                            : log_path;
      catfuzz::Campaign campaign(&db, config);
      catfuzz::CampaignSummary s = campaign.Run(resume);
      catfuzz::ExecutionLog log = catfuzz::ExecutionLog::Read(config.log_path);
      catfuzz::Report rep = catfuzz::ComputeReport(log, db);
      WriteText(report_file, rep.ToJson().dump(1) + "\n");
      WriteText(report_file.string() + ".txt", rep.ToText());
      WriteReproducers(rep, log, db, report_file.string() + ".repro");
      std::cout << rep.ToText();
      if (s.budget_exhausted) std::cout << "\nstopped: wall-clock budget exhausted\n";
      return rep.crash_groups.empty() ? kExitOk : kExitCrashes;
    }

    if (*report) {
      catfuzz::InputDatabase db = catfuzz::InputDatabase::Load(report_db);
      catfuzz::Report rep =
          catfuzz::ComputeReport(catfuzz::ExecutionLog::Read(report_log), db);
      if (!report_out.empty()) WriteText(report_out, rep.ToJson().dump(1) + "\n");
      std::cout << rep.ToText();
      return kExitOk;
    }

    if (*repro) {
      const auto argv_w = WorkerArgv(repro_harness, repro_faults);
      catfuzz::RunResult r;
      if (!repro_file.empty()) {
        catfuzz::TestCase tc = catfuzz::TestCaseFromReproducer(ReadJson(repro_file));
        catfuzz::Executor ex(argv_w, tc.timeout_ms);
        r = ex.Run(tc);
      } else {
        if (repro_log.empty() || repro_db.empty()) {
          throw catfuzz::Error(catfuzz::ErrorCode::kInvalidArgument,
                               "--case needs --log and --db");
        }
        catfuzz::InputDatabase db = catfuzz::InputDatabase::Load(repro_db);
        r = catfuzz::ReplayCase(catfuzz::ExecutionLog::Read(repro_log), db,
                                repro_case, argv_w);
      }
      if (!r.outcome) {
        std::cout << "discarded: " << r.incident << "\n";
        return kExitError;
      }
      std::cout << catfuzz::OutcomeName(r.outcome->kind);
      if (!r.outcome->detail.empty()) std::cout << ": " << r.outcome->detail;
      std::cout << "\n";
      return r.outcome->kind == catfuzz::OutcomeKind::kCrash ? kExitCrashes : kExitOk;
    }

    if (*suite) {
      if (!suite_corpus.empty()) {
        catfuzz::WriteCorpus(suite_corpus, catfuzz::SeedCorpus());
      }
      if (suite_spec) std::cout << catfuzz::SuiteSpec().dump(1) << "\n";
      if (suite_corpus.empty() && !suite_spec) {
        for (const auto& t : catfuzz::SyntheticSuite()) {
          std::cout << t.name << "(";
          for (size_t i = 0; i < t.params.size(); ++i) {
            std::cout << (i ? "," : "") << t.params[i];
          }
          std::cout << ")\n";
        }
      }
      return kExitOk;
    }
  } catch (const catfuzz::Error& e) {
    spdlog::error("{}", e.what());
    std::cerr << "catfuzz: " << catfuzz::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "catfuzz: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
