#pragma once

#include <stdexcept>
#include <string>

namespace immp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear solve did not reach its residual tolerance.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// The (regularized) Gram matrix is not numerically positive definite, i.e. the
/// state left the region where the constraint Jacobian has full rank.
class GramSingular : public Error {
 public:
  using Error::Error;
};

/// The SHAKE-type Newton iteration for the position constraint failed.
class NewtonDiverged : public Error {
 public:
  using Error::Error;
};

/// Fixman gradient requested for nonlinear constraints without second derivatives.
class MissingSecondDerivatives : public Error {
 public:
  using Error::Error;
};

/// No point on the tuning grid reached the requested acceptance ratio.
class TargetUnreachable : public Error {
 public:
  using Error::Error;
};

/// The integrand of the effective potential is not confining numerically.
class QuadratureDivergent : public Error {
 public:
  using Error::Error;
};

/// Too few crossing events to estimate a transition time.
class InsufficientCrossings : public Error {
 public:
  using Error::Error;
};

/// State became non-finite during integration.
class UnstableIntegration : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (unknown key, bad value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace immp
