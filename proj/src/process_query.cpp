#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "dlecc/error.hpp"
#include "dlecc/goldreich_levin.hpp"

namespace dlecc {
namespace {

class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0) fail(ErrorKind::Io, "process_query: pipe failed");
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      fail(ErrorKind::Io, "process_query: pipe failed");
    }
    pid_ = fork();
    if (pid_ < 0) fail(ErrorKind::Io, "process_query: fork failed");
    if (pid_ == 0) {
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
    in_ = fdopen(to_child[1], "w");
    out_ = fdopen(from_child[0], "r");
    if (!in_ || !out_) fail(ErrorKind::Io, "process_query: fdopen failed");
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() {
    if (in_) fclose(in_);
    if (out_) fclose(out_);
    if (pid_ > 0) {
      int status = 0;
      if (waitpid(pid_, &status, WNOHANG) == 0) {
        kill(pid_, SIGTERM);
        waitpid(pid_, &status, 0);
      }
    }
  }

  double query(const BitVector& x) {
    std::lock_guard<std::mutex> lock(mu_);
    line_.clear();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) line_.push_back(',');
      line_ += x.test(i) ? "-1" : "1";
    }
    line_.push_back('\n');
    if (std::fputs(line_.c_str(), in_) == EOF || std::fflush(in_) != 0)
      fail(ErrorKind::Io, "process_query: write to child failed");
    char buf[128];
    if (!std::fgets(buf, sizeof buf, out_)) fail(ErrorKind::Io, "process_query: child closed its output");
    char* end = nullptr;
    const double v = std::strtod(buf, &end);
    if (end == buf || (v != 1.0 && v != -1.0))
      fail(ErrorKind::Parse, std::string("process_query: expected +1 or -1, got: ") + buf);
    return v;
  }

 private:
  pid_t pid_ = -1;
  FILE* in_ = nullptr;
  FILE* out_ = nullptr;
  std::mutex mu_;
  std::string line_;
};

}  // namespace

QueryFunction process_query(const std::string& command, std::size_t n) {
  require(!command.empty(), "process_query: empty command");
  std::signal(SIGPIPE, SIG_IGN);
  auto child = std::make_shared<ChildProcess>(command);
  return QueryFunction(n, [child](const BitVector& x) { return child->query(x); });
}

}  // namespace dlecc
