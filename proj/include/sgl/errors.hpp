#pragma once

#include <stdexcept>
#include <string>

namespace sgl {

enum class ErrorCode {
  EmptyPartition,
  InvalidSize,
  DimensionMismatch,
  InvalidResponse,
  InvalidData,
  SingularHessian,
  DegenerateWeight,
  ProblemTooLarge,
  IllPosed,
  MaxIterations,
  NonFiniteObjective,
  InfeasibleScenario,
  InsufficientRecoveries,
  UsageError,
  FileNotFound,
};

const char* to_string(ErrorCode code);

/// Library error carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace sgl
