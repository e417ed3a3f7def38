#include "nnrepair/smt/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <sstream>

#include "nnrepair/error.hpp"
#include "nnrepair/file_util.hpp"
#include "nnrepair/smt/sexpr.hpp"

extern char** environ;

namespace nnrepair::smt {
namespace {

using Clock = std::chrono::steady_clock;

struct ProcessResult {
  std::string out;
  std::string err;
  bool timed_out = false;
  bool spawned = false;
  int exit_code = -1;
  std::string spawn_error;
  double seconds = 0.0;
};

// A solver that exits before reading all of stdin must not kill us with SIGPIPE.
void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    reset();
    fd_ = std::exchange(other.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
};

bool make_pipe(Fd& read_end, Fd& write_end) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    return false;
  }
  read_end = Fd(fds[0]);
  write_end = Fd(fds[1]);
  return true;
}

ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input,
                          double timeout_s) {
  ignore_sigpipe();
  ProcessResult result;
  if (argv.empty()) {
    result.spawn_error = "empty solver command";
    return result;
  }

  Fd in_r, in_w, out_r, out_w, err_r, err_w;
  if (!make_pipe(in_r, in_w) || !make_pipe(out_r, out_w) || !make_pipe(err_r, err_w)) {
    result.spawn_error = std::string("pipe: ") + std::strerror(errno);
    return result;
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_r.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_w.get(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_w.get(), STDERR_FILENO);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::vector<char*> args;
  for (const auto& a : argv) {
    args.push_back(const_cast<char*>(a.c_str()));
  }
  args.push_back(nullptr);

  const auto start = Clock::now();
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, &attr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  in_r.reset();
  out_w.reset();
  err_w.reset();
  if (rc != 0) {
    result.spawn_error = "cannot start '" + argv[0] + "': " + std::strerror(rc);
    return result;
  }
  result.spawned = true;

  ::fcntl(in_w.get(), F_SETFL, ::fcntl(in_w.get(), F_GETFL) | O_NONBLOCK);
  std::size_t written = 0;
  if (input.empty()) {
    in_w.reset();
  }
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_s));
  char buffer[65536];

  while (out_r.get() >= 0 || err_r.get() >= 0) {
    const auto now = Clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    const int wait_ms = static_cast<int>(std::min<long long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1, 1000));

    pollfd fds[3];
    int n = 0;
    int in_idx = -1, out_idx = -1, err_idx = -1;
    if (in_w.get() >= 0) {
      fds[n] = {in_w.get(), POLLOUT, 0};
      in_idx = n++;
    }
    if (out_r.get() >= 0) {
      fds[n] = {out_r.get(), POLLIN, 0};
      out_idx = n++;
    }
    if (err_r.get() >= 0) {
      fds[n] = {err_r.get(), POLLIN, 0};
      err_idx = n++;
    }
    const int ready = ::poll(fds, static_cast<nfds_t>(n), wait_ms);
    if (ready < 0) {
      if (errno == EINTR) {
        continue;
      }
      break;
    }
    if (in_idx >= 0 && fds[in_idx].revents != 0) {
      if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
        in_w.reset();
      } else {
        const ssize_t w = ::write(in_w.get(), input.data() + written, input.size() - written);
        if (w > 0) {
          written += static_cast<std::size_t>(w);
          if (written == input.size()) {
            in_w.reset();
          }
        } else if (w < 0 && errno != EAGAIN && errno != EINTR) {
          in_w.reset();
        }
      }
    }
    auto drain = [&](int idx, Fd& fd, std::string& sink) {
      if (idx < 0 || fds[idx].revents == 0) {
        return;
      }
      const ssize_t r = ::read(fd.get(), buffer, sizeof(buffer));
      if (r > 0) {
        sink.append(buffer, static_cast<std::size_t>(r));
      } else if (r == 0 || (errno != EAGAIN && errno != EINTR)) {
        fd.reset();
      }
    };
    drain(out_idx, out_r, result.out);
    drain(err_idx, err_r, result.err);
  }

  if (result.timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

Rational value_of(const SExpr& e) {
  if (e.is_atom) {
    if (e.atom == "true" || e.atom == "false") {
      return Rational(e.atom == "true" ? 1 : 0);
    }
    return parse_rational(e.atom);
  }
  if (e.items.empty() || !e.items[0].is_atom) {
    throw ParseError("unexpected model value " + e.to_string());
  }
  const std::string& head = e.items[0].atom;
  if (head == "-" && e.items.size() == 2) {
    return -value_of(e.items[1]);
  }
  if (head == "-" && e.items.size() == 3) {
    return value_of(e.items[1]) - value_of(e.items[2]);
  }
  if (head == "/" && e.items.size() == 3) {
    Rational den = value_of(e.items[2]);
    if (sgn(den) == 0) {
      throw ParseError("division by zero in model value");
    }
    return value_of(e.items[1]) / den;
  }
  if (head == "root-obj" || head == "_") {
    throw UnsupportedValueError("algebraic model value " + e.to_string() +
                                " cannot be represented exactly");
  }
  throw ParseError("unexpected model value " + e.to_string());
}

bool looks_like_value_list(const SExpr& e) {
  if (e.is_atom || e.items.empty()) {
    return false;
  }
  for (const auto& item : e.items) {
    if (item.is_atom || item.items.size() != 2 || !item.items[0].is_atom) {
      return false;
    }
  }
  return true;
}

Model model_from(const std::vector<SExpr>& exprs, std::span<const std::string> names) {
  Model values;
  for (const auto& e : exprs) {
    if (!looks_like_value_list(e)) {
      continue;
    }
    for (const auto& pair : e.items) {
      values[pair.items[0].atom] = value_of(pair.items[1]);
    }
  }
  Model model;
  for (const auto& name : names) {
    auto it = values.find(name);
    if (it == values.end()) {
      throw ParseError("solver output has no value for '" + name + "'");
    }
    model.emplace(name, it->second);
  }
  return model;
}

std::string first_error(const std::vector<SExpr>& exprs) {
  for (const auto& e : exprs) {
    if (e.is_list() && !e.items.empty() && e.items[0].is_atom && e.items[0].atom == "error") {
      return e.to_string();
    }
  }
  return {};
}

}  // namespace

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::kSat: return "SAT";
    case SolverStatus::kUnsat: return "UNSAT";
    case SolverStatus::kTimeout: return "TIMEOUT";
    case SolverStatus::kUnknown: return "UNKNOWN";
    case SolverStatus::kError: return "ERROR";
  }
  return "ERROR";
}

SolverStatus parse_status(std::string_view text) {
  if (text == "SAT") return SolverStatus::kSat;
  if (text == "UNSAT") return SolverStatus::kUnsat;
  if (text == "TIMEOUT") return SolverStatus::kTimeout;
  if (text == "UNKNOWN") return SolverStatus::kUnknown;
  if (text == "ERROR") return SolverStatus::kError;
  throw ParseError("unknown solver status '" + std::string(text) + "'");
}

std::vector<std::string> split_command(std::string_view command_line) {
  std::vector<std::string> argv;
  std::istringstream in{std::string(command_line)};
  std::string token;
  while (in >> token) {
    argv.push_back(token);
  }
  return argv;
}

Model parse_model(std::string_view output, std::span<const std::string> names) {
  return model_from(parse_sexprs(output), names);
}

SolverVerdict run_solver_text(std::string_view text, std::span<const std::string> value_names,
                              const SolverOptions& options, std::string_view archive_name) {
  if (!options.archive_dir.empty() && !archive_name.empty()) {
    std::filesystem::create_directories(options.archive_dir);
    write_text_file((std::filesystem::path(options.archive_dir) / archive_name).string() + ".smt2",
                    text);
  }

  std::vector<std::string> argv = options.command;
  std::string input(text);
  std::filesystem::path temp_path;
  if (options.use_temp_file) {
    char pattern[] = "/tmp/nnrepair-XXXXXX.smt2";
    const int fd = ::mkstemps(pattern, 5);
    SolverVerdict verdict;
    if (fd < 0) {
      verdict.message = std::string("mkstemps: ") + std::strerror(errno);
      return verdict;
    }
    ::close(fd);
    temp_path = pattern;
    write_text_file(temp_path.string(), text);
    argv.push_back(temp_path.string());
    input.clear();
  }

  ProcessResult proc = run_process(argv, input, options.timeout_s);
  if (!temp_path.empty()) {
    std::error_code ignored;
    std::filesystem::remove(temp_path, ignored);
  }

  SolverVerdict verdict;
  verdict.wall_time_seconds = proc.seconds;
  verdict.raw_output = proc.out;
  if (!proc.spawned) {
    verdict.status = SolverStatus::kError;
    verdict.message = proc.spawn_error;
    return verdict;
  }
  if (proc.timed_out) {
    verdict.status = SolverStatus::kTimeout;
    verdict.message = "killed after " + std::to_string(options.timeout_s) + " s";
    return verdict;
  }

  std::vector<SExpr> exprs;
  try {
    exprs = parse_sexprs(proc.out);
  } catch (const ParseError& e) {
    verdict.status = SolverStatus::kError;
    verdict.message = std::string("unparseable solver output: ") + e.what();
    return verdict;
  }

  std::size_t status_index = exprs.size();
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    const auto& e = exprs[i];
    if (e.is_atom && (e.atom == "sat" || e.atom == "unsat" || e.atom == "unknown" ||
                      e.atom == "timeout")) {
      status_index = i;
      break;
    }
  }
  if (status_index == exprs.size()) {
    verdict.status = SolverStatus::kError;
    std::string err = first_error(exprs);
    verdict.message = !err.empty() ? err
                      : !proc.err.empty()
                          ? proc.err
                          : "solver produced no verdict (exit code " +
                                std::to_string(proc.exit_code) + ")";
    return verdict;
  }
  const std::vector<SExpr> before(exprs.begin(), exprs.begin() + static_cast<long>(status_index));
  if (std::string err = first_error(before); !err.empty()) {
    verdict.status = SolverStatus::kError;
    verdict.message = err;
    return verdict;
  }

  const std::string& answer = exprs[status_index].atom;
  if (answer == "unsat") {
    verdict.status = SolverStatus::kUnsat;
  } else if (answer == "unknown") {
    verdict.status = SolverStatus::kUnknown;
    verdict.message = "solver answered unknown";
  } else if (answer == "timeout") {
    verdict.status = SolverStatus::kTimeout;
  } else {
    verdict.status = SolverStatus::kSat;
    if (!value_names.empty()) {
      const std::vector<SExpr> after(exprs.begin() + static_cast<long>(status_index) + 1,
                                     exprs.end());
      try {
        verdict.model = model_from(after, value_names);
      } catch (const Error& e) {
        verdict.status = SolverStatus::kError;
        verdict.message = e.what();
      }
    }
  }
  return verdict;
}

SolverVerdict run_solver(const Script& script, const SolverOptions& options,
                         std::string_view archive_name) {
  std::string text;
  try {
    text = emit(script);
  } catch (const EmissionError& e) {
    SolverVerdict verdict;
    verdict.status = SolverStatus::kError;
    verdict.message = e.what();
    return verdict;
  }
  return run_solver_text(text, script.get_values, options, archive_name);
}

}  // namespace nnrepair::smt
