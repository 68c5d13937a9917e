#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace commeval {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (edge lists, partitions, temporal streams).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A precondition on a graph or partition does not hold.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A detection algorithm failed (non-convergence, empty graph, ...).
class DetectionError : public Error {
 public:
  DetectionError(std::string algorithm, const std::string& what)
      : Error(algorithm + ": " + what), algorithm_(std::move(algorithm)) {}

  const std::string& algorithm() const noexcept { return algorithm_; }

 private:
  std::string algorithm_;
};

}  // namespace commeval
