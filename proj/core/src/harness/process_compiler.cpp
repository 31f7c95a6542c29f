// Copyright 2026 The adaptfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <thread>

#include "adaptfuzz/error.hpp"
#include "adaptfuzz/harness/compiler.hpp"

extern char** environ;

namespace adaptfuzz::harness {

namespace {

using Clock = std::chrono::steady_clock;

class UniqueFd {
 public:
  explicit UniqueFd(int fd = -1) : fd_(fd) {}
  ~UniqueFd() { reset(); }
  UniqueFd(UniqueFd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  UniqueFd& operator=(UniqueFd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

struct TempInput {
  std::string path;
  ~TempInput() {
    if (!path.empty()) ::unlink(path.c_str());
  }
};

void write_all(int fd, std::string_view data, const std::string& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIoFailure,
                  "write " + path + ": " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::vector<std::string> merged_environment(
    const std::vector<std::pair<std::string, std::string>>& extra) {
  std::vector<std::string> env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    const auto eq = kv.find('=');
    const auto key = kv.substr(0, eq);
    bool overridden = false;
    for (const auto& [k, v] : extra) overridden |= (k == key);
    if (!overridden) env.emplace_back(kv);
  }
  for (const auto& [k, v] : extra) env.push_back(k + "=" + v);
  return env;
}

}  // namespace

ProcessCompiler::ProcessCompiler(ProcessCompilerConfig config)
    : config_(std::move(config)) {
  const auto& bin = config_.binary;
  if (bin.empty() || ::access(bin.c_str(), X_OK) != 0) {
    throw Error(ErrorCode::kCompilerMissing,
                "compiler binary not executable: " + bin.string());
  }
}

std::string ProcessCompiler::describe() const {
  return "exec:" + config_.binary.string();
}

ExecutionOutcome ProcessCompiler::run(std::string_view program_text,
                                      std::optional<std::string_view> pass_flag,
                                      std::chrono::milliseconds timeout) const {
  const auto start = Clock::now();

  TempInput input;
  {
    std::string tmpl = (config_.scratch_dir / "adaptfuzz-XXXXXX.mlir").string();
    UniqueFd fd(::mkstemps(tmpl.data(), 5));
    if (fd.get() < 0) {
      throw Error(ErrorCode::kIoFailure,
                  "mkstemps in " + config_.scratch_dir.string() + ": " +
                      std::strerror(errno));
    }
    input.path = tmpl;
    write_all(fd.get(), program_text, tmpl);
  }

  std::array<int, 2> out_raw{}, err_raw{};
  if (::pipe2(out_raw.data(), O_CLOEXEC) != 0 ||
      ::pipe2(err_raw.data(), O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kIoFailure, std::string("pipe2: ") + std::strerror(errno));
  }
  UniqueFd out_r(out_raw[0]), out_w(out_raw[1]);
  UniqueFd err_r(err_raw[0]), err_w(err_raw[1]);

  std::vector<std::string> args{config_.binary.string()};
  args.insert(args.end(), config_.leading_args.begin(), config_.leading_args.end());
  if (pass_flag) args.emplace_back(*pass_flag);
  args.push_back(input.path);
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  auto env = merged_environment(config_.env);
  std::vector<char*> envp;
  for (auto& e : env) envp.push_back(e.data());
  envp.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, out_w.get(), 1);
  posix_spawn_file_actions_adddup2(&actions, err_w.get(), 2);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  sigset_t defaults;
  sigemptyset(&defaults);
  sigaddset(&defaults, SIGPIPE);
  sigset_t empty_mask;
  sigemptyset(&empty_mask);
  posix_spawnattr_setsigdefault(&attr, &defaults);
  posix_spawnattr_setsigmask(&attr, &empty_mask);
  posix_spawnattr_setpgroup(&attr, 0);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGDEF |
                                      POSIX_SPAWN_SETSIGMASK);
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(),
                                envp.data());
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    throw Error(ErrorCode::kCompilerMissing,
                "cannot spawn " + args[0] + ": " + std::strerror(rc));
  }
  out_w.reset();
  err_w.reset();

  ExecutionOutcome outcome;
  const auto deadline = start + timeout;
  bool timed_out = false;
  std::array<pollfd, 2> fds{{{out_r.get(), POLLIN, 0}, {err_r.get(), POLLIN, 0}}};
  std::array<std::string*, 2> sinks{&outcome.stdout_text, &outcome.stderr_text};
  std::array<char, 65536> buf{};
  int open_fds = 2;
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    const int n = ::poll(fds.data(), fds.size(), static_cast<int>(left.count()));
    if (n < 0 && errno != EINTR) break;
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t got = ::read(fds[i].fd, buf.data(), buf.size());
      if (got > 0) {
        sinks[i]->append(buf.data(), static_cast<std::size_t>(got));
      } else if (got == 0 || errno != EINTR) {
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }

  int status = 0;
  while (!timed_out) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) break;
    if (Clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
  }

  if (WIFEXITED(status)) outcome.exit_code = WEXITSTATUS(status);
  // Our own SIGKILL is not the program's signal.
  if (WIFSIGNALED(status) && !timed_out) outcome.signal = WTERMSIG(status);
  outcome.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(
      Clock::now() - start);
  outcome.kind = classify(outcome.exit_code, outcome.signal,
                          outcome.stderr_text, timed_out);
  return outcome;
}

}  // namespace adaptfuzz::harness
