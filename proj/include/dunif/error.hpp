#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dunif {

enum class ErrorCode {
  InvalidInput,
  NonManifoldEdge,
  NonManifoldVertex,
  NonOrientable,
  Disconnected,
  DuplicateFace,
  TriangleInequalityViolated,
  DegenerateTriangle,
  PreconditionViolated,
  NotMeanZero,
  SingularSystem,
  TooLarge,
  HypothesisViolated,
  WrongGenus,
  SolverDiverged,
  RegularityLost,
  GeodesicSolverFailed,
  SubdivisionTooCoarse,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code and, where one applies,
// the index of the offending face/edge/vertex.
class Error : public std::runtime_error {
public:
  static constexpr std::int64_t kNoIndex = -1;

  Error(ErrorCode code, const std::string& message, std::int64_t index = kNoIndex);

  ErrorCode code() const noexcept { return code_; }
  std::int64_t index() const noexcept { return index_; }

private:
  ErrorCode code_;
  std::int64_t index_;
};

} // namespace dunif
