// Copyright 2026 The topaug Authors.
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

#include "topaug/adapter.h"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <set>
#include <thread>

extern char **environ;

namespace topaug {
namespace {

class Child {
 public:
  // Spawns /bin/sh -c command with piped stdin and stdout.
  static std::optional<Child> Spawn(const std::string &command,
                                    std::string *error) {
    // A dead child must surface as EPIPE on write, not kill this process.
    signal(SIGPIPE, SIG_IGN);
    int in[2], out[2];
    if (pipe2(in, O_CLOEXEC) != 0) {
      *error = std::strerror(errno);
      return std::nullopt;
    }
    if (pipe2(out, O_CLOEXEC) != 0) {
      *error = std::strerror(errno);
      close(in[0]);
      close(in[1]);
      return std::nullopt;
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out[1], STDOUT_FILENO);
    // Own process group, so that a kill also reaches anything sh forks.
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    const char *argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    pid_t pid;
    int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr,
                         const_cast<char *const *>(argv), environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&actions);
    close(in[0]);
    close(out[1]);
    if (rc != 0) {
      *error = std::strerror(rc);
      close(in[1]);
      close(out[0]);
      return std::nullopt;
    }
    return Child(pid, in[1], out[0]);
  }

  Child(Child &&other) noexcept
      : pid_(std::exchange(other.pid_, -1)),
        stdin_(std::exchange(other.stdin_, -1)),
        stdout_(std::exchange(other.stdout_, -1)) {}
  Child &operator=(Child &&) = delete;

  ~Child() {
    CloseStdin();
    if (stdout_ >= 0) close(stdout_);
    if (pid_ > 0) {
      Kill();
      Wait();
    }
  }

  int stdout_fd() const { return stdout_; }

  // Hands the write end of stdin to the caller, who must close it.
  int ReleaseStdin() { return std::exchange(stdin_, -1); }

  void CloseStdin() {
    if (stdin_ >= 0) close(std::exchange(stdin_, -1));
  }

  void Kill() {
    if (pid_ > 0) kill(-pid_, SIGKILL);
  }

  // Reaps the child; returns the raw wait status.
  int Wait() {
    int status = 0;
    if (pid_ > 0) {
      while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
      pid_ = -1;
    }
    return status;
  }

 private:
  Child(pid_t pid, int in, int out) : pid_(pid), stdin_(in), stdout_(out) {}

  pid_t pid_;
  int stdin_;
  int stdout_;
};

void WriteAll(int fd, const std::string &data) {
  size_t done = 0;
  while (done < data.size()) {
    ssize_t n = write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;  // child went away; the reader reports it
    }
    done += static_cast<size_t>(n);
  }
}

}  // namespace

const char *AdapterErrorKindName(AdapterErrorKind kind) {
  switch (kind) {
    case AdapterErrorKind::kSpawnFailed:
      return "SpawnFailed";
    case AdapterErrorKind::kAdapterCrashed:
      return "AdapterCrashed";
    case AdapterErrorKind::kProtocolViolation:
      return "ProtocolViolation";
    case AdapterErrorKind::kTimeout:
      return "Timeout";
  }
  return "Unknown";
}

std::string AdapterError::ToString() const {
  std::string out = AdapterErrorKindName(kind);
  if (request_id) out += " (request " + std::to_string(*request_id) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

AdapterRun RunLineProtocol(const AdapterOptions &options,
                           const std::vector<nlohmann::json> &requests,
                           size_t responses_per_request,
                           const ResponseValidator &validate) {
  AdapterRun run;
  auto fail = [&run](AdapterErrorKind kind, std::optional<int64_t> id,
                     std::string message) {
    if (!run.error) run.error = AdapterError{kind, id, std::move(message)};
  };

  std::map<int64_t, std::vector<nlohmann::json>> pending;
  std::vector<int64_t> order;
  for (const nlohmann::json &request : requests) {
    int64_t id = request.at("id").get<int64_t>();
    pending[id];
    order.push_back(id);
  }
  if (requests.empty()) return run;

  std::string spawn_error;
  std::optional<Child> child = Child::Spawn(options.command, &spawn_error);
  if (!child) {
    fail(AdapterErrorKind::kSpawnFailed, std::nullopt, spawn_error);
    return run;
  }

  std::string payload;
  for (const nlohmann::json &request : requests) {
    payload += request.dump();
    payload += '\n';
  }
  // The writer owns stdin and closes it after the last request, which is
  // the child's signal that no more requests follow.
  const int stdin_fd = child->ReleaseStdin();
  std::thread writer([stdin_fd, &payload] {
    WriteAll(stdin_fd, payload);
    close(stdin_fd);
  });

  auto handle_line = [&](const std::string &line) {
    ++run.lines_read;
    nlohmann::json response;
    try {
      response = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &) {
      fail(AdapterErrorKind::kProtocolViolation, std::nullopt,
           "malformed line: " + line.substr(0, 200));
      return;
    }
    if (!response.is_object() || !response.contains("id") ||
        !response["id"].is_number_integer()) {
      fail(AdapterErrorKind::kProtocolViolation, std::nullopt,
           "response without integer id: " + line.substr(0, 200));
      return;
    }
    int64_t id = response["id"].get<int64_t>();
    auto it = pending.find(id);
    if (it == pending.end()) {
      fail(AdapterErrorKind::kProtocolViolation, id, "unknown request id");
      return;
    }
    if (it->second.size() >= responses_per_request) {
      fail(AdapterErrorKind::kProtocolViolation, id,
           "more than " + std::to_string(responses_per_request) +
               " responses");
      return;
    }
    if (std::string problem = validate ? validate(response) : "";
        !problem.empty()) {
      fail(AdapterErrorKind::kProtocolViolation, id, problem);
      return;
    }
    it->second.push_back(std::move(response));
  };

  std::string buffer;
  char chunk[65536];
  bool eof = false;
  while (!run.error && !eof) {
    pollfd pfd{child->stdout_fd(), POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(options.timeout.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(AdapterErrorKind::kAdapterCrashed, std::nullopt,
           std::strerror(errno));
      break;
    }
    if (ready == 0) {
      fail(AdapterErrorKind::kTimeout, std::nullopt,
           "no output for " + std::to_string(options.timeout.count()) +
               " ms");
      break;
    }
    ssize_t n = read(child->stdout_fd(), chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(AdapterErrorKind::kAdapterCrashed, std::nullopt,
           std::strerror(errno));
      break;
    }
    if (n == 0) {
      eof = true;
      if (!buffer.empty()) handle_line(std::exchange(buffer, ""));
      break;
    }
    buffer.append(chunk, static_cast<size_t>(n));
    size_t start = 0;
    for (size_t nl; !run.error &&
                    (nl = buffer.find('\n', start)) != std::string::npos;
         start = nl + 1) {
      std::string line = buffer.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) handle_line(line);
    }
    buffer.erase(0, start);
  }

  if (run.error) child->Kill();
  writer.join();
  int status = child->Wait();

  const bool exited_cleanly = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  // The shell reports a missing or non-executable command as 127 or 126.
  if (!run.error && run.lines_read == 0 && WIFEXITED(status) &&
      (WEXITSTATUS(status) == 127 || WEXITSTATUS(status) == 126)) {
    fail(AdapterErrorKind::kSpawnFailed, std::nullopt,
         "command not runnable (exit status " +
             std::to_string(WEXITSTATUS(status)) + "): " + options.command);
  }
  if (!run.error) {
    for (int64_t id : order) {
      size_t got = pending[id].size();
      if (got == responses_per_request) continue;
      if (exited_cleanly) {
        fail(AdapterErrorKind::kProtocolViolation, id,
             "expected " + std::to_string(responses_per_request) +
                 " responses, got " + std::to_string(got));
      } else {
        fail(AdapterErrorKind::kAdapterCrashed, id,
             WIFSIGNALED(status)
                 ? "killed by signal " + std::to_string(WTERMSIG(status))
                 : "exit status " + std::to_string(WEXITSTATUS(status)));
      }
      break;
    }
    if (!run.error && !exited_cleanly) {
      fail(AdapterErrorKind::kAdapterCrashed, std::nullopt,
           "adapter exited abnormally after answering every request");
    }
  }

  for (int64_t id : order) {
    if (pending[id].size() == responses_per_request) {
      run.complete[id] = std::move(pending[id]);
    }
  }
  return run;
}

}  // namespace topaug
