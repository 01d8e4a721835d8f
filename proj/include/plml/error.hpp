#pragma once

#include <stdexcept>
#include <string>

namespace plml {

enum class ErrorKind {
  Contract,  // caller broke a precondition (dimensions, ranges)
  Data,      // malformed input data or model file
  Solver,    // numerical failure inside an optimizer
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorKind::Contract, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorKind::Solver, what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

// Re-raises `e` with "[stage] " prepended, preserving its kind.
[[noreturn]] inline void rethrow_with_stage(const Error& e, const std::string& stage) {
  const std::string msg = "[" + stage + "] " + e.what();
  switch (e.kind()) {
    case ErrorKind::Contract: throw ContractError(msg);
    case ErrorKind::Data: throw DataError(msg);
    case ErrorKind::Solver: throw SolverError(msg);
  }
  throw Error(e.kind(), msg);
}

}  // namespace plml
