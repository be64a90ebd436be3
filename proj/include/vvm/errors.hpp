#pragma once

#include <stdexcept>
#include <string>

namespace vvm {

// A symmetric matrix that was required to be positive definite failed its
// Cholesky factorization. Signals an invalid EP state when raised from the
// conversion paths.
struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidVariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Direction is numerically zero or the covariance has collapsed along it.
struct DegenerateDirection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CavityCollapse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoValidRoot : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParallelDirections : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wraps any failure inside a merge proposal; callers drop the candidate.
struct MergeInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateWeights : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  long line;
  ParseError(const std::string& msg, long line_no)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"),
        line(line_no) {}
};

}  // namespace vvm
