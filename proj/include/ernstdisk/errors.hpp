#pragma once

#include <stdexcept>
#include <string>

namespace ernstdisk {

// Base class for runtime numerical failures (quadrature, series, root finding).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested tolerance not reached within the evaluation budget.
struct NonConvergence : NumericalError {
  using NumericalError::NumericalError;
};

struct InvalidContour : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Principal-value pole coincides with a contour vertex.
struct PoleOnVertex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A sheeted square root was evaluated on a branch cut without a side tag.
struct OnCutWithoutSide : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// arcsin argument fell on the principal branch cut.
struct OnArcsinCut : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Genus-1 geometry requested too close to the rotation axis.
struct DegenerateSurfaceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PathThroughBranchPoint : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonPositiveImB : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Theta denominator on (or numerically near) the theta divisor.
struct ThetaZeroDenominator : NumericalError {
  using NumericalError::NumericalError;
};

struct ErgosphereDetected : NumericalError {
  using NumericalError::NumericalError;
};

// Field evaluation requested at (or too close to) the disk rim, where the
// solution is continuous but not C^1.
struct RimPoint : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InversionFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace ernstdisk
