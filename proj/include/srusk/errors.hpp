#ifndef SRUSK_ERRORS_HPP
#define SRUSK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace srusk {

// Base class for every error the engine raises on purpose.
struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A partial elementary function was evaluated outside its domain
// (log of a nonpositive value, sqrt of a negative one, division by zero, ...).
struct DomainError : EngineError {
  using EngineError::EngineError;
};

// An iterative solver ran out of iterations before reaching its tolerance.
struct NoConvergence : EngineError {
  using EngineError::EngineError;
};

// Newton needed to invert a velocity Hessian that is rank deficient.
struct SingularJacobian : EngineError {
  using EngineError::EngineError;
};

// Same condition, raised by the direct Euler-Lagrange oracle.
struct SingularHessian : EngineError {
  using EngineError::EngineError;
};

// A point violates the primary constraints beyond the on-manifold tolerance.
struct NotOnW1 : EngineError {
  using EngineError::EngineError;
};

// A point violates the current constraint set beyond tolerance.
struct NotOnConstraintSet : EngineError {
  using EngineError::EngineError;
};

// The constraint algorithm produced a condition with no zero set in the box.
struct InconsistentSystem : EngineError {
  using EngineError::EngineError;
};

// The Hessian kernel changes dimension across the sample set, so null
// directions cannot be frozen.
struct RankDrift : EngineError {
  using EngineError::EngineError;
};

// Integration was requested for a gauge system without a rule for the
// free coefficients.
struct VectorFieldUndetermined : EngineError {
  using EngineError::EngineError;
};

// Post-step constraint projection did not converge.
struct ProjectionFailed : EngineError {
  using EngineError::EngineError;
};

// Requested model name is not in the registry.
struct UnknownModel : EngineError {
  using EngineError::EngineError;
};

// Run configuration could not be parsed or is invalid.
struct ConfigError : EngineError {
  using EngineError::EngineError;
};

}  // namespace srusk

#endif
