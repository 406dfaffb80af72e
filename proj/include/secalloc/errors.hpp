#pragma once

#include <stdexcept>
#include <string>

namespace secalloc {

// Failure taxonomy shared by the whole library.  The CLI maps these onto
// distinct process exit codes, so keep the set small and the meanings crisp.

// Malformed input document: missing key, wrong JSON type, bad value type.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid graph: out-of-range vertex, self-edge, duplicate
// edge, disconnected topology, non-positive gains or thresholds.
struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Random-graph sampling exhausted its retry budget.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric guard tripped: indefinite closed-loop matrix, cross-check
// mismatch, degenerate linear program, and the like.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Polynomial root extraction failed to converge or verify.
struct RootSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ill-posed attack scenario, e.g. target equal to the attack vertex.
struct InvalidScenario : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cutting-plane refinement exceeded its iteration budget without a
// certified solution.
struct IterationLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No feasible monitor set exists within the budget.
struct EmptyCollection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request outside an operation's supported range (e.g. oracle arity).
struct ScopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace secalloc
