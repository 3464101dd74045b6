#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmt {

/// Pipeline stage that raised an error. The CLI prefixes messages with it.
enum class Stage { Graph, Frontend, Mapper, Sim, Memsys, Stats, Cli };

std::string_view stage_name(Stage stage) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& what) : std::runtime_error(what), stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Out-of-range coordinate, thread id or delta.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(Stage::Graph, "range error: " + what) {}
};

class ParameterError : public Error {
 public:
  ParameterError(Stage stage, const std::string& what)
      : Error(stage, "parameter error: " + what) {}
};

/// Syntax and semantic errors in kernel source; carries the source position.
class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& what)
      : Error(Stage::Frontend,
              std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        line_(line), col_(col) {}
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  int line_;
  int col_;
};

class LowerError : public Error {
 public:
  explicit LowerError(const std::string& what) : Error(Stage::Frontend, what) {}
};

class CapacityError : public Error {
 public:
  CapacityError(std::string unit_class, const std::string& what)
      : Error(Stage::Mapper, "capacity error: " + what), unit_class_(std::move(unit_class)) {}
  const std::string& unit_class() const noexcept { return unit_class_; }

 private:
  std::string unit_class_;
};

/// Runtime fault inside a simulated kernel (e.g. out-of-range memory index).
class SimFault : public Error {
 public:
  explicit SimFault(const std::string& what) : Error(Stage::Sim, "fault: " + what) {}
};

class DeadlockError : public Error {
 public:
  explicit DeadlockError(const std::string& report) : Error(Stage::Sim, "deadlock: " + report) {}
};

}  // namespace dmt
