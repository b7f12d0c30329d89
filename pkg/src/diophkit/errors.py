"""Exception hierarchy shared by all diophkit modules.

Exit-code mapping used by the CLI:
  InputError and subclasses      -> 1
  PrecisionInsufficient          -> 2
  EnumerationBudgetExceeded      -> 3
"""


class DiophkitError(Exception):
    """Base class for all diophkit errors."""


class InputError(DiophkitError):
    """Invalid user input: dimensions, ranges, malformed configs."""


class PrecisionInsufficient(DiophkitError):
    """A decision (floor, comparison, membership) cannot be made at the
    current working precision.  Callers holding exact sources may retry at
    higher precision; past the configured bit cap this is terminal."""


class EnumerationBudgetExceeded(DiophkitError):
    """An enumeration would exceed the configured membership-test budget."""


class DimensionMismatch(InputError):
    """Subspace dimensions are inconsistent (need 1 <= d <= n-1, shapes agree)."""


class PerfectSquareRadicand(InputError):
    """A surd entry has a perfect-square radicand; the value is rational and
    should be written as one."""


class MalformedEntry(InputError):
    """A config entry does not match the surd/dec schema."""


class ZeroVectorJ(InputError):
    """The integer vector j must be nonzero."""


class MonotonicityViolation(DiophkitError):
    """An approximation function flagged non-increasing was observed to increase."""


class ZeroDenominator(DiophkitError):
    """Some j.row(M) is an integer, so a reciprocal distance is infinite."""


class PhiOutOfRange(InputError):
    """phi(J) must lie strictly between 0 and 1."""


class InsufficientData(InputError):
    """Too few sample points for a fit."""


class NotBad(DiophkitError):
    """Exact rational degeneracy: the matrix is not phi-badly approximable
    for any positive phi."""


class InsufficientRecords(DiophkitError):
    """Fewer than two record minima exist; no exponent estimate possible."""


class DeltaOutOfRange(InputError):
    """delta outside the admissible arc range."""


class NonMonotonePsi(InputError):
    """The dyadic cover route requires a non-increasing approximation function."""


class NuTooSmall(InputError):
    """The dimension-bound formula needs nu >= 1/n."""


class CostExponentOutOfRange(InputError):
    """Cover-cost exponents s > d carry no information (the s-cost criterion
    is vacuous there) and are rejected."""
