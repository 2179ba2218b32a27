"""Exception hierarchy shared by all phasekit modules."""


class PhasekitError(Exception):
    """Base class for all phasekit errors."""


class WrongArity(PhasekitError):
    """Rate vector length does not match the model."""


class NonErgodic(PhasekitError):
    """Simulation could not reach the observed state within the jump guard."""


class DegenerateSpectrum(PhasekitError):
    """Eigenvalues too close to separate; carries the offending pair."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class IllConditioned(PhasekitError):
    """Linear system condition number beyond the trusted range."""


class NoConvergence(PhasekitError):
    """Optimizer did not converge; best-so-far result attached."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class InvalidDensity(PhasekitError):
    """Fitted density cannot be kept positive on the data support."""


class GenericBranchMiss(PhasekitError):
    """Input violates an inequation of the generic inversion branch."""


class NegativeDiscriminant(PhasekitError):
    """Quadratic discriminant of the generic branch is negative."""


class M3HypersurfaceMiss(PhasekitError):
    """Moments do not lie on the M3 solution hypersurface."""


class NoBranchMatches(PhasekitError):
    """No triangular branch accepts the moment vector; diagnostics attached."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class ZeroPivot(PhasekitError):
    """A divisor in the chain recursion fell below the pivot threshold."""


class SingularSteadyState(PhasekitError):
    """Steady-state null space is not one-dimensional."""


class DomainViolation(PhasekitError):
    """Rate vector outside the domain of a model-to-model map."""
