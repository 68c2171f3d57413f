#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parpath {

// Exit-code contract shared by the C API and the CLI.
enum class ErrorKind { Config = 2, Numerical = 3, InsufficientData = 4, Io = 5, Argument = 6 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

// Bad arguments to an operation: out-of-range times, mismatched grids, indices outside I/J.
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::Argument, what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct SolverError : NumericalError {
  SolverError(const std::string& what, std::size_t last_good)
      : NumericalError(what), last_good_index(last_good) {}
  std::size_t last_good_index;
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& what) : Error(ErrorKind::InsufficientData, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace parpath
