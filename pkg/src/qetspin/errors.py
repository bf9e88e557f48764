"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures to
distinct process exit statuses without inspecting messages.
"""

from __future__ import annotations


class QETError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    code = "qet_error"


class ConfigError(QETError, ValueError):
    """Invalid user-supplied configuration (grid sizes, ranges, paths)."""

    exit_code = 2
    code = "config_error"


class DomainError(QETError, ValueError):
    """An input lies outside the mathematical domain of an operation."""

    exit_code = 3
    code = "domain_error"


class RankDeficient(DomainError):
    """A density matrix has an eigenvalue at or below the logarithm floor."""

    code = "rank_deficient"


class DegenerateGroundState(DomainError):
    code = "degenerate_ground_state"


class SectorViolation(DomainError):
    code = "sector_violation"


class ZeroProbability(DomainError):
    code = "zero_probability"


class DegenerateObjective(DomainError):
    """The feedback objective is flat, so the optimal angle is undefined."""

    code = "degenerate_objective"

    def __init__(self, message: str, theta: float = 0.0, value: float = 0.0):
        super().__init__(message)
        self.theta = theta
        self.value = value


class AllZero(DomainError):
    """A through-origin fit was requested on data with vanishing abscissa."""

    code = "all_zero"


class InvariantViolation(QETError):
    """A computed quantity broke an identity it must satisfy."""

    exit_code = 4
    code = "invariant_violation"


class CalibrationFailure(InvariantViolation):
    code = "calibration_failure"


class BlockViolation(InvariantViolation):
    """-log(rho34) has weight outside the two 2x2 blocks of the ansatz."""

    code = "block_violation"
