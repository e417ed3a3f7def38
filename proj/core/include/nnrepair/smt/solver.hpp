#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnrepair/rational.hpp"
#include "nnrepair/smt/script.hpp"

namespace nnrepair::smt {

enum class SolverStatus { kSat, kUnsat, kTimeout, kUnknown, kError };

std::string to_string(SolverStatus status);
SolverStatus parse_status(std::string_view text);

using Model = std::map<std::string, Rational>;

struct SolverVerdict {
  SolverStatus status = SolverStatus::kError;
  /// Present iff status is SAT and the script requested values.
  std::optional<Model> model;
  double wall_time_seconds = 0.0;
  std::string raw_output;
  /// Human-readable reason for ERROR/UNKNOWN verdicts.
  std::string message;
};

struct SolverOptions {
  /// argv of the solver. In stdin mode the script is piped in; in file mode
  /// the path of a temporary .smt2 file is appended.
  std::vector<std::string> command{"z3", "-in"};
  double timeout_s = 600.0;
  bool use_temp_file = false;
  /// When non-empty every emitted script is also written here.
  std::string archive_dir;
};

/// Splits "z3 -in -smt2" on whitespace.
std::vector<std::string> split_command(std::string_view command_line);

/// Emits the script, runs the solver subprocess, and parses its answer. The
/// process is killed once `timeout_s` wall-clock seconds elapse. Never throws
/// for solver-side failures; they come back as ERROR verdicts.
SolverVerdict run_solver(const Script& script, const SolverOptions& options,
                         std::string_view archive_name = {});

/// Same, for already emitted text. `value_names` are the get-value symbols.
SolverVerdict run_solver_text(std::string_view text, std::span<const std::string> value_names,
                              const SolverOptions& options, std::string_view archive_name = {});

/// Extracts exact values for `names` from a get-value response. Accepts
/// decimals, integers, (/ p q) and (- v); Booleans map to 1 and 0. Throws UnsupportedValueError for
/// algebraic numbers (root-obj) and ParseError when a name is missing.
Model parse_model(std::string_view output, std::span<const std::string> names);

}  // namespace nnrepair::smt
