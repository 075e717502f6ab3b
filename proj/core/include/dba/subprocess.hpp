#pragma once

#include <string>

namespace dba {

// Child process spoken to over a newline-delimited request/response protocol:
// one line written to its stdin, one line read back from its stdout. Not safe
// for concurrent use; owners must declare themselves serial.
class LineProcess {
 public:
  explicit LineProcess(const std::string& command);
  ~LineProcess();

  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  // Writes `request` plus '\n', flushes, and blocks for one response line.
  std::string round_trip(const std::string& request);

  const std::string& command() const { return command_; }

 private:
  void close_pipes();

  std::string command_;
  int child_pid_ = -1;
  int to_child_ = -1;    // write end
  int from_child_ = -1;  // read end
  std::string buffer_;
};

}  // namespace dba
