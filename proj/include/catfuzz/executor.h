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

#ifndef CATFUZZ_EXECUTOR_H_
#define CATFUZZ_EXECUTOR_H_

#include <sys/types.h>

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catfuzz/outcome.h"
#include "catfuzz/protocol.h"
#include "catfuzz/value.h"

namespace catfuzz {

inline constexpr int kDefaultTimeoutMs = 5000;
inline constexpr size_t kDefaultRestartCap = 50;
inline constexpr size_t kDetailMessageCap = 200;

struct CaseArg {
  std::string param;
  size_t input = 0;
  size_t category = 0;
  Value value;
};

struct TestCase {
  uint64_t case_id = 0;
  std::string function;
  std::vector<CaseArg> args;
  int timeout_ms = kDefaultTimeoutMs;
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::kValid;
  std::string detail;  // empty for valid
  double wall_ms = 0;
};

// A case either has an outcome or was discarded after a protocol desync.
struct RunResult {
  std::optional<Outcome> outcome;
  std::string incident;
  bool skipped = false;  // not started before the pool deadline
};

enum class ExitClass { kCrash, kDesync, kUnchanged };

// `wait_status` as reported by waitpid.
ExitClass ClassifyWorkerExit(int wait_status, bool response_received);

// "SIGABRT at <frame>", "exit 3", ...
std::string CrashDetail(int wait_status, const std::string& top_frame);

// Invalid-outcome detail: class plus a bounded message prefix.
std::string InvalidDetail(const std::string& cls, const std::string& message);

// One supervised child speaking the wire protocol on stdin/stdout.
class Worker {
 public:
  struct Exchange {
    enum Status { kResponse, kTimeout, kDied, kGarbage } status = kResponse;
    Response response;
    int wait_status = 0;
    std::string top_frame;
    std::string raw;
  };

  explicit Worker(std::vector<std::string> argv);
  ~Worker();
  Worker(const Worker&) = delete;
  Worker& operator=(const Worker&) = delete;

  // Spawns the child and waits for a pong. Throws kWorkerRestartFailure.
  void Start(int timeout_ms = kDefaultTimeoutMs);
  bool alive() const { return pid_ > 0; }
  pid_t pid() const { return pid_; }
  Exchange Call(const Request& request, int timeout_ms);
  void Kill();

 private:
  int Reap(bool block);
  void CloseFds();

  std::vector<std::string> argv_;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  int err_fd_ = -1;
  std::string out_buf_;
};

// Runs cases on one worker, restarting it after crashes and timeouts.
class Executor {
 public:
  Executor(std::vector<std::string> worker_argv, int timeout_ms = kDefaultTimeoutMs);

  RunResult Run(const TestCase& tc);
  std::vector<std::string> ListFunctions();
  size_t restarts() const { return restarts_; }

 private:
  void EnsureWorker();

  Worker worker_;
  int timeout_ms_;
  size_t restarts_ = 0;
};

// N executors running one round of independent cases in parallel. Also
// tracks consecutive restarts per function and quarantines at the cap.
class WorkerPool {
 public:
  WorkerPool(std::vector<std::string> worker_argv, size_t workers,
             int timeout_ms = kDefaultTimeoutMs,
             size_t restart_cap = kDefaultRestartCap);

  // Results in the order of `cases`. Throws kWorkerPoolFailure when a slot
  // cannot restart its worker.
  // Cases not started by `deadline` come back skipped.
  std::vector<RunResult> RunAll(
      const std::vector<TestCase>& cases,
      std::optional<std::chrono::steady_clock::time_point> deadline = {});
  std::vector<std::string> ListFunctions();

  bool Quarantined(const std::string& function) const;
  const std::map<std::string, size_t>& restart_counters() const {
    return consecutive_;
  }
  void RestoreCounters(std::map<std::string, size_t> counters) {
    consecutive_ = std::move(counters);
  }
  size_t size() const { return executors_.size(); }

 private:
  std::vector<std::unique_ptr<Executor>> executors_;
  size_t restart_cap_;
  std::map<std::string, size_t> consecutive_;
};

}  // namespace catfuzz

#endif  // CATFUZZ_EXECUTOR_H_
