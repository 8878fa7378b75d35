#include "dunif/error.hpp"

namespace dunif {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidInput: return "InvalidInput";
  case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
  case ErrorCode::NonManifoldVertex: return "NonManifoldVertex";
  case ErrorCode::NonOrientable: return "NonOrientable";
  case ErrorCode::Disconnected: return "Disconnected";
  case ErrorCode::DuplicateFace: return "DuplicateFace";
  case ErrorCode::TriangleInequalityViolated: return "TriangleInequalityViolated";
  case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
  case ErrorCode::PreconditionViolated: return "PreconditionViolated";
  case ErrorCode::NotMeanZero: return "NotMeanZero";
  case ErrorCode::SingularSystem: return "SingularSystem";
  case ErrorCode::TooLarge: return "TooLarge";
  case ErrorCode::HypothesisViolated: return "HypothesisViolated";
  case ErrorCode::WrongGenus: return "WrongGenus";
  case ErrorCode::SolverDiverged: return "SolverDiverged";
  case ErrorCode::RegularityLost: return "RegularityLost";
  case ErrorCode::GeodesicSolverFailed: return "GeodesicSolverFailed";
  case ErrorCode::SubdivisionTooCoarse: return "SubdivisionTooCoarse";
  case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {
std::string format_message(ErrorCode code, const std::string& message) {
  std::string out(to_string(code));
  if (!message.empty()) {
    out += ": ";
    out += message;
  }
  return out;
}
} // namespace

Error::Error(ErrorCode code, const std::string& message, std::int64_t index)
    : std::runtime_error(format_message(code, message)), code_(code), index_(index) {}

} // namespace dunif
