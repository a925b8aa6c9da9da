#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oim {

// Every failure the library raises derives from Error so callers (the CLI in
// particular) can map categories to exit codes with a single catch.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidProblem : public Error {
 public:
  using Error::Error;
};

// Raised for bad generator/benchmark specifications (e.g. grid size mismatch).
class SpecError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  ParseError(const std::string& what, std::string path)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  // 1-based line number, 0 when the error is not line-oriented.
  std::size_t line() const noexcept { return line_; }
  // JSON pointer-ish path for structured inputs.
  const std::string& path() const noexcept { return path_; }

 private:
  std::size_t line_ = 0;
  std::string path_;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long long step() const noexcept { return step_; }

 private:
  long long step_;
};

}  // namespace oim
