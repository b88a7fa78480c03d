#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radiographer {

// Bad input files, bad configuration, IO failures. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// Failures inside the processing pipeline (missing silence data, empty store, ...). Exit code 1.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radiographer
