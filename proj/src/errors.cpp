#include "sgl/errors.hpp"

namespace sgl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidResponse: return "InvalidResponse";
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::DegenerateWeight: return "DegenerateWeight";
    case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorCode::IllPosed: return "IllPosed";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::InfeasibleScenario: return "InfeasibleScenario";
    case ErrorCode::InsufficientRecoveries: return "InsufficientRecoveries";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::FileNotFound: return "FileNotFound";
  }
  return "UnknownError";
}

}  // namespace sgl
