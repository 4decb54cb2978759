#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace gridplan {

// Central tolerances. Everything that judges feasibility, integrality or
// residuals uses these three numbers.
inline constexpr double kFeasTol = 1e-7;   // LP feasibility/optimality
inline constexpr double kIntTol = 1e-6;    // binary integrality
inline constexpr double kCheckTol = 1e-6;  // replay and reporting residuals

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input file (system, CSV, scenario, MPS, solution).
struct ParseError : Error {
  using Error::Error;
};

// A structurally broken model (dangling reference, impossible request).
struct ModelError : Error {
  using Error::Error;
};

// Numerical or contract failure inside the solver stack.
struct SolverError : Error {
  using Error::Error;
};

}  // namespace gridplan
