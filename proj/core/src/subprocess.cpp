#include "dba/subprocess.hpp"

#include <csignal>
#include <cstring>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

namespace dba {

LineProcess::LineProcess(const std::string& command) : command_(command) {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe(in_pipe) != 0) throw std::runtime_error("subprocess: pipe() failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw std::runtime_error("subprocess: pipe() failed");
  }

  const pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("subprocess: fork() failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  child_pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
}

LineProcess::~LineProcess() {
  close_pipes();
  if (child_pid_ > 0) {
    int status = 0;
    ::waitpid(child_pid_, &status, 0);
  }
}

void LineProcess::close_pipes() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
}

std::string LineProcess::round_trip(const std::string& request) {
  if (to_child_ < 0) throw std::runtime_error("subprocess: pipe already closed");

  std::string line = request;
  line.push_back('\n');
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t k = ::write(to_child_, line.data() + written, line.size() - written);
    if (k <= 0) throw std::runtime_error("subprocess: write to '" + command_ + "' failed");
    written += static_cast<std::size_t>(k);
  }

  while (true) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string response = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!response.empty() && response.back() == '\r') response.pop_back();
      return response;
    }
    char chunk[4096];
    const ssize_t k = ::read(from_child_, chunk, sizeof(chunk));
    if (k <= 0)
      throw std::runtime_error("subprocess: '" + command_ + "' closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(k));
  }
}

}  // namespace dba
