#include "sim/subprocess.hpp"

#include <csignal>
#include <cstring>

#include <poll.h>
#include <sys/wait.h>
#include <time.h>
#include <unistd.h>

namespace sim {

namespace {

double monotonic_now() {
  timespec ts{};
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

// Writing into a pipe whose reader died must not kill the harness.
const bool kSigpipeIgnored = [] {
  std::signal(SIGPIPE, SIG_IGN);
  return true;
}();

}  // namespace

ExchangeResult run_line_exchange(const std::string& command,
                                 const std::string& request_line,
                                 double timeout_seconds) {
  (void)kSigpipeIgnored;
  ExchangeResult result;

  int to_child[2] = {-1, -1};
  int from_child[2] = {-1, -1};
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    result.failed = true;
    result.detail = "pipe creation failed";
    return result;
  }

  const pid_t pid = fork();
  if (pid < 0) {
    result.failed = true;
    result.detail = "fork failed";
    return result;
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  close(to_child[0]);
  close(from_child[1]);

  // Best-effort write; the child may legitimately exit without reading.
  std::size_t written = 0;
  while (written < request_line.size()) {
    const ssize_t n = write(to_child[1], request_line.data() + written,
                            request_line.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(to_child[1]);

  const double deadline = monotonic_now() + timeout_seconds;
  std::string buffer;
  bool eof = false;
  while (!eof && buffer.find('\n') == std::string::npos) {
    const double remaining = deadline - monotonic_now();
    if (remaining <= 0.0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{from_child[0], POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(remaining * 1000.0) + 1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      result.failed = true;
      result.detail = "poll failed";
      break;
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = read(from_child[0], chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      result.failed = true;
      result.detail = "read failed";
      break;
    }
    if (n == 0) {
      eof = true;
    } else {
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
  close(from_child[0]);

  if (result.timed_out) {
    kill(pid, SIGKILL);
  }
  int status = 0;
  waitpid(pid, &status, 0);

  if (!result.timed_out && !result.failed) {
    const auto eol = buffer.find('\n');
    result.line = eol == std::string::npos ? buffer : buffer.substr(0, eol);
    if (result.line.empty()) {
      result.failed = true;
      if (WIFEXITED(status) && WEXITSTATUS(status) != 0) {
        result.detail =
            "planner exited with status " + std::to_string(WEXITSTATUS(status));
      } else {
        result.detail = "planner produced no output";
      }
    }
  }
  return result;
}

}  // namespace sim
