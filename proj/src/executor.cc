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

#include "catfuzz/executor.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "catfuzz/error.h"

namespace catfuzz {
namespace {

using Clock = std::chrono::steady_clock;

void IgnoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { signal(SIGPIPE, SIG_IGN); });
}

std::string SignalName(int sig) {
  switch (sig) {
    case SIGABRT: return "SIGABRT";
    case SIGSEGV: return "SIGSEGV";
    case SIGBUS: return "SIGBUS";
    case SIGFPE: return "SIGFPE";
    case SIGILL: return "SIGILL";
    case SIGKILL: return "SIGKILL";
    case SIGTERM: return "SIGTERM";
    default: return "signal " + std::to_string(sig);
  }
}

int64_t MsLeft(Clock::time_point deadline) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                               Clock::now())
      .count();
}

// Last "#0 " line of a stderr capture.
std::string TopFrame(const std::string& err) {
  std::string frame;
  size_t pos = 0;
  while (pos < err.size()) {
    size_t end = err.find('\n', pos);
    if (end == std::string::npos) end = err.size();
    if (err.compare(pos, 3, "#0 ") == 0) frame = err.substr(pos + 3, end - pos - 3);
    pos = end + 1;
  }
  return frame;
}

bool WriteAll(int fd, const std::string& s) {
  size_t off = 0;
  while (off < s.size()) {
    ssize_t n = write(fd, s.data() + off, s.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<size_t>(n);
  }
  return true;
}

}  // namespace

ExitClass ClassifyWorkerExit(int wait_status, bool response_received) {
  if (response_received) return ExitClass::kUnchanged;
  if (WIFSIGNALED(wait_status)) return ExitClass::kCrash;
  if (WIFEXITED(wait_status) && WEXITSTATUS(wait_status) != 0) {
    return ExitClass::kCrash;
  }
  return ExitClass::kDesync;
}

std::string CrashDetail(int wait_status, const std::string& top_frame) {
  std::string d;
  if (WIFSIGNALED(wait_status)) {
    d = SignalName(WTERMSIG(wait_status));
  } else if (WIFEXITED(wait_status)) {
    d = "exit " + std::to_string(WEXITSTATUS(wait_status));
  } else {
    d = "status " + std::to_string(wait_status);
  }
  if (!top_frame.empty()) d += " at " + top_frame;
  return d;
}

std::string InvalidDetail(const std::string& cls, const std::string& message) {
  return cls + ": " + message.substr(0, kDetailMessageCap);
}

// -- Worker ----------------------------------------------------------------

Worker::Worker(std::vector<std::string> argv) : argv_(std::move(argv)) {
  IgnoreSigpipe();
}

Worker::~Worker() { Kill(); }

void Worker::CloseFds() {
  for (int* fd : {&in_fd_, &out_fd_, &err_fd_}) {
    if (*fd >= 0) close(*fd);
    *fd = -1;
  }
  out_buf_.clear();
}

int Worker::Reap(bool block) {
  int status = 0;
  if (pid_ <= 0) return 0;
  for (;;) {
    pid_t r = waitpid(pid_, &status, block ? 0 : WNOHANG);
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) return -1;
    break;
  }
  pid_ = -1;
  return status;
}

void Worker::Kill() {
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    Reap(true);
  }
  CloseFds();
}

void Worker::Start(int timeout_ms) {
  Kill();
  if (argv_.empty()) {
    throw Error(ErrorCode::kWorkerRestartFailure, "empty worker command");
  }
  int in[2], out[2], err[2], exec_err[2];
  if (pipe2(in, O_CLOEXEC) || pipe2(out, O_CLOEXEC) || pipe2(err, O_CLOEXEC) ||
      pipe2(exec_err, O_CLOEXEC)) {
    throw Error(ErrorCode::kWorkerRestartFailure,
                std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (std::string& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) {
    throw Error(ErrorCode::kWorkerRestartFailure,
                std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(in[0], 0);
    dup2(out[1], 1);
    dup2(err[1], 2);
    signal(SIGPIPE, SIG_DFL);
    execvp(args[0], args.data());
    int e = errno;
    (void)!write(exec_err[1], &e, sizeof(e));
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  close(err[1]);
  close(exec_err[1]);
  pid_ = pid;
  in_fd_ = in[1];
  out_fd_ = out[0];
  err_fd_ = err[0];
  fcntl(err_fd_, F_SETFL, fcntl(err_fd_, F_GETFL) | O_NONBLOCK);

  int e = 0;
  ssize_t n;
  do {
    n = read(exec_err[0], &e, sizeof(e));
  } while (n < 0 && errno == EINTR);
  close(exec_err[0]);
  if (n > 0) {
    Reap(true);
    CloseFds();
    throw Error(ErrorCode::kWorkerRestartFailure,
                "cannot exec " + argv_[0] + ": " + std::strerror(e));
  }
  Exchange ping = Call(Request{0, "ping", "", {}}, timeout_ms);
  if (ping.status != Exchange::kResponse || ping.response.result != "pong") {
    Kill();
    throw Error(ErrorCode::kWorkerRestartFailure,
                "worker " + argv_[0] + " did not answer ping");
  }
}

Worker::Exchange Worker::Call(const Request& request, int timeout_ms) {
  Exchange ex;
  std::string err_buf;
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  bool out_eof = false;

  auto drain_err = [&] {
    char buf[4096];
    for (;;) {
      ssize_t n = read(err_fd_, buf, sizeof(buf));
      if (n > 0) {
        err_buf.append(buf, n);
        if (err_buf.size() > 16384) err_buf.erase(0, err_buf.size() - 8192);
        continue;
      }
      if (n < 0 && errno == EINTR) continue;
      break;
    }
  };

  if (!WriteAll(in_fd_, EncodeRequest(request) + "\n")) out_eof = true;

  while (!out_eof) {
    const size_t nl = out_buf_.find('\n');
    if (nl != std::string::npos) {
      ex.raw = out_buf_.substr(0, nl);
      out_buf_.erase(0, nl + 1);
      try {
        ex.response = DecodeResponse(ex.raw);
        ex.status = ex.response.id == request.id ? Exchange::kResponse
                                                 : Exchange::kGarbage;
      } catch (const Error&) {
        ex.status = Exchange::kGarbage;
      }
      drain_err();
      return ex;
    }
    const int64_t left = MsLeft(deadline);
    if (left <= 0) {
      kill(pid_, SIGKILL);
      ex.wait_status = Reap(true);
      drain_err();
      CloseFds();
      ex.status = Exchange::kTimeout;
      return ex;
    }
    pollfd fds[2] = {{out_fd_, POLLIN, 0}, {err_fd_, POLLIN, 0}};
    int r = poll(fds, 2, static_cast<int>(std::min<int64_t>(left, 1000)));
    if (r < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (fds[1].revents & (POLLIN | POLLHUP)) drain_err();
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[65536];
      ssize_t n = read(out_fd_, buf, sizeof(buf));
      if (n > 0) {
        out_buf_.append(buf, n);
      } else if (n == 0 || errno != EINTR) {
        out_eof = true;
      }
    }
  }

  // Stdout closed without a full response: the worker is gone or going.
  const auto grace = Clock::now() + std::chrono::milliseconds(2000);
  int status = Reap(false);
  while (status == -1 && Clock::now() < grace) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
    status = Reap(false);
  }
  if (status == -1) {
    kill(pid_, SIGKILL);
    status = Reap(true);
  }
  drain_err();
  CloseFds();
  ex.status = Exchange::kDied;
  ex.wait_status = status;
  ex.top_frame = TopFrame(err_buf);
  return ex;
}

// -- Executor --------------------------------------------------------------

Executor::Executor(std::vector<std::string> worker_argv, int timeout_ms)
    : worker_(std::move(worker_argv)), timeout_ms_(timeout_ms) {}

void Executor::EnsureWorker() {
  if (worker_.alive()) return;
  std::string last;
  for (int attempt = 0; attempt < 3; ++attempt) {
    try {
      worker_.Start(std::max(timeout_ms_, kDefaultTimeoutMs));
      return;
    } catch (const Error& e) {
      last = e.what();
    }
  }
  throw Error(ErrorCode::kWorkerRestartFailure, last);
}

RunResult Executor::Run(const TestCase& tc) {
  EnsureWorker();
  Request req{static_cast<int64_t>(tc.case_id), "invoke", tc.function, {}};
  for (const CaseArg& a : tc.args) req.args.push_back(a.value);

  const auto start = Clock::now();
  Worker::Exchange ex = worker_.Call(req, tc.timeout_ms);
  const double wall =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  RunResult result;
  switch (ex.status) {
    case Worker::Exchange::kResponse: {
      const Response& r = ex.response;
      if (r.result == "ok") {
        result.outcome = Outcome{OutcomeKind::kValid, "", wall};
      } else if (r.result == "exception") {
        const OutcomeKind kind = r.cls == kSetupErrorClass
                                     ? OutcomeKind::kSetupError
                                     : OutcomeKind::kInvalid;
        result.outcome = Outcome{kind, InvalidDetail(r.cls, r.message), wall};
      } else {
        worker_.Kill();
        ++restarts_;
        result.incident = "unexpected response: " + ex.raw.substr(0, 200);
      }
      break;
    }
    case Worker::Exchange::kTimeout:
      ++restarts_;
      result.outcome = Outcome{OutcomeKind::kTimeout,
                               "deadline " + std::to_string(tc.timeout_ms) + " ms",
                               wall};
      break;
    case Worker::Exchange::kDied:
      ++restarts_;
      if (ClassifyWorkerExit(ex.wait_status, false) == ExitClass::kCrash) {
        result.outcome = Outcome{OutcomeKind::kCrash,
                                 CrashDetail(ex.wait_status, ex.top_frame), wall};
      } else {
        result.incident = "worker exited cleanly without a response";
      }
      break;
    case Worker::Exchange::kGarbage:
      worker_.Kill();
      ++restarts_;
      result.incident = "protocol desync: " + ex.raw.substr(0, 200);
      break;
  }
  return result;
}

std::vector<std::string> Executor::ListFunctions() {
  EnsureWorker();
  Worker::Exchange ex =
      worker_.Call(Request{0, "list_functions", "", {}}, timeout_ms_);
  if (ex.status != Worker::Exchange::kResponse ||
      ex.response.result != "functions") {
    worker_.Kill();
    throw Error(ErrorCode::kProtocolDesync, "list_functions failed");
  }
  return ex.response.names;
}

// -- WorkerPool ------------------------------------------------------------

WorkerPool::WorkerPool(std::vector<std::string> worker_argv, size_t workers,
                       int timeout_ms, size_t restart_cap)
    : restart_cap_(restart_cap) {
  if (workers == 0) workers = 1;
  for (size_t i = 0; i < workers; ++i) {
    executors_.push_back(std::make_unique<Executor>(worker_argv, timeout_ms));
  }
}

std::vector<RunResult> WorkerPool::RunAll(
    const std::vector<TestCase>& cases,
    std::optional<std::chrono::steady_clock::time_point> deadline) {
  std::vector<RunResult> results(cases.size());
  std::atomic<size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto work = [&](Executor& ex) {
    for (size_t i = next++; i < cases.size(); i = next++) {
      if (deadline && Clock::now() >= *deadline) {
        results[i].skipped = true;
        continue;
      }
      try {
        results[i] = ex.Run(cases[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const size_t n = std::min(executors_.size(), cases.size());
  if (n <= 1) {
    if (!cases.empty()) work(*executors_[0]);
  } else {
    std::vector<std::thread> threads;
    for (size_t i = 0; i < n; ++i) threads.emplace_back(work, std::ref(*executors_[i]));
    for (std::thread& t : threads) t.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const Error& e) {
      throw Error(ErrorCode::kWorkerPoolFailure, e.what());
    }
  }
  for (size_t i = 0; i < cases.size(); ++i) {
    const RunResult& r = results[i];
    if (r.skipped) continue;
    const bool restarted =
        !r.outcome || r.outcome->kind == OutcomeKind::kCrash ||
        r.outcome->kind == OutcomeKind::kTimeout;
    size_t& count = consecutive_[cases[i].function];
    count = restarted ? count + 1 : 0;
  }
  return results;
}

std::vector<std::string> WorkerPool::ListFunctions() {
  return executors_[0]->ListFunctions();
}

bool WorkerPool::Quarantined(const std::string& function) const {
  auto it = consecutive_.find(function);
  return it != consecutive_.end() && it->second >= restart_cap_;
}

}  // namespace catfuzz
