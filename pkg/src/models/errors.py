"""Exception hierarchy for the penning-axial toolkit.

Every error carries the process exit code the CLI maps it to.
"""


class PenningAxialError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 3


class ConfigError(PenningAxialError, ValueError):
    """Invalid or inconsistent run configuration."""

    exit_code = 1


class UnstableTrapError(PenningAxialError, ValueError):
    """Trap parameters give no radial confinement (ω_c²/4 ≤ ω_z²/2)."""

    exit_code = 1


class IndeterminateRegimeError(PenningAxialError, ValueError):
    """Coupling regime is undefined because both M and ε vanish."""

    exit_code = 1


class SingularResponseError(PenningAxialError, ArithmeticError):
    """Driven response is singular: undamped drive exactly on a free-mode frequency."""

    exit_code = 3


class BranchAmbiguityError(PenningAxialError):
    """Floquet exponents cannot be matched unambiguously to analytic candidates."""

    exit_code = 3


class IntegrationError(PenningAxialError):
    """The ODE solver failed (e.g. step-size underflow)."""

    exit_code = 3
