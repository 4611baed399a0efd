#include "subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>

namespace ctrans::proc {

namespace {

using Clock = std::chrono::steady_clock;

void set_cloexec(int fd) { fcntl(fd, F_SETFD, FD_CLOEXEC); }

// Drains fds into bufs until both hit EOF or the deadline passes.
// Returns false when the deadline expired first.
bool drain(int out_fd, int err_fd, std::string& out_buf, std::string& err_buf,
           Clock::time_point deadline, bool has_deadline) {
  struct pollfd fds[2] = {{out_fd, POLLIN, 0}, {err_fd, POLLIN, 0}};
  std::string* bufs[2] = {&out_buf, &err_buf};
  bool open[2] = {true, true};
  char chunk[4096];
  while (open[0] || open[1]) {
    int timeout_ms = -1;
    if (has_deadline) {
      auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                           deadline - Clock::now())
                           .count();
      if (remaining <= 0) return false;
      timeout_ms = static_cast<int>(remaining);
    }
    for (int i = 0; i < 2; ++i) fds[i].events = open[i] ? POLLIN : 0;
    int rc = poll(fds, 2, timeout_ms);
    if (rc == 0) return false;  // deadline
    if (rc < 0) {
      if (errno == EINTR) continue;
      return true;
    }
    for (int i = 0; i < 2; ++i) {
      if (!open[i]) continue;
      if (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) {
        ssize_t n = read(fds[i].fd, chunk, sizeof(chunk));
        if (n > 0) {
          bufs[i]->append(chunk, static_cast<std::size_t>(n));
        } else if (n == 0 || (n < 0 && errno != EINTR && errno != EAGAIN)) {
          open[i] = false;
        }
      }
    }
  }
  return true;
}

}  // namespace

CommandResult run_command(const CommandSpec& spec) {
  CommandResult result;
  if (spec.argv.empty()) {
    result.spawn_failed = true;
    result.spawn_error = "empty argv";
    return result;
  }

  int out_pipe[2], err_pipe[2], exec_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0 || pipe(exec_pipe) != 0) {
    result.spawn_failed = true;
    result.spawn_error = std::strerror(errno);
    return result;
  }
  set_cloexec(exec_pipe[1]);

  auto start = Clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    result.spawn_failed = true;
    result.spawn_error = std::strerror(errno);
    return result;
  }

  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    close(exec_pipe[0]);
    if (!spec.cwd.empty() && chdir(spec.cwd.c_str()) != 0) {
      int err = errno;
      (void)!write(exec_pipe[1], &err, sizeof(err));
      _exit(127);
    }
    for (const auto& [k, v] : spec.env) setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> argv;
    argv.reserve(spec.argv.size() + 1);
    for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int err = errno;
    (void)!write(exec_pipe[1], &err, sizeof(err));
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);

  // exec handshake: the CLOEXEC pipe stays silent iff execvp succeeded
  int exec_errno = 0;
  ssize_t handshake = read(exec_pipe[0], &exec_errno, sizeof(exec_errno));
  close(exec_pipe[0]);

  bool has_deadline = spec.timeout_secs > 0;
  auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(spec.timeout_secs));

  std::string out_buf, err_buf;
  bool complete =
      drain(out_pipe[0], err_pipe[0], out_buf, err_buf, deadline, has_deadline);
  if (!complete) {
    result.timed_out = true;
    kill(-pid, SIGKILL);
    // pick up whatever was flushed before the kill
    drain(out_pipe[0], err_pipe[0], out_buf, err_buf, Clock::time_point{},
          false);
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.wall_secs =
      std::chrono::duration<double>(Clock::now() - start).count();

  if (handshake > 0) {
    result.spawn_failed = true;
    result.spawn_error = std::string(spec.argv[0]) + ": " +
                         std::strerror(exec_errno);
    return result;
  }

  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  result.output = out_buf;
  result.output += err_buf;
  return result;
}

bool command_on_path(const std::string& name) {
  if (name.empty()) return false;
  if (name.find('/') != std::string::npos)
    return access(name.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::string paths(path);
  std::size_t pos = 0;
  while (pos <= paths.size()) {
    std::size_t next = paths.find(':', pos);
    std::string dir = paths.substr(
        pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!dir.empty()) {
      std::string candidate = dir + "/" + name;
      if (access(candidate.c_str(), X_OK) == 0) return true;
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return false;
}

}  // namespace ctrans::proc
