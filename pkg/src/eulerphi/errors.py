"""Exception hierarchy for the library.

Every error raised on a contract violation derives from EulerphiError, so
callers (and the CLI exit-code map) can tell contract failures apart from
genuine bugs.
"""


class EulerphiError(Exception):
    """Base class for all library-level errors."""


# --- construction / validation ------------------------------------------

class BadModulus(EulerphiError):
    """Character modulus is invalid (q < 1, wrong table length, bad discriminant)."""


class WrongSupport(EulerphiError):
    """Character value nonzero at a residue not coprime to the modulus, or vice versa."""


class NonMultiplicative(EulerphiError):
    """Character table fails complete multiplicativity or unit-modulus checks."""


class BadProductSpec(EulerphiError):
    """Euler product local data violates a structural invariant."""


class RootOutOfDisk(BadProductSpec):
    """An inverse root has modulus above 1."""


class DegreeNotMinimal(BadProductSpec):
    """No prime has all d inverse roots nonzero (and the table is not all-zero)."""


class NotPrime(EulerphiError):
    """A local operation was asked about a non-prime index."""


# --- constants / series --------------------------------------------------

class CutoffTooSmall(EulerphiError):
    """Prime cutoff below the smallest admissible value."""


class PrincipalCharacter(EulerphiError):
    """L-value requested for a principal character (period sums do not vanish)."""


class PrecisionUnreachable(EulerphiError):
    """Target bound needs more terms than the configured cap."""


class ModeUnavailable(EulerphiError):
    """Requested evaluation mode does not exist for this product kind."""


class SOutOfRange(EulerphiError):
    """Series argument s outside the admissible half-plane/interval."""


# --- tables ---------------------------------------------------------------

class OutOfMemory(EulerphiError):
    """Requested table size beyond the configured cap."""


class XBeyondTable(EulerphiError):
    """Evaluation point beyond the tabulated range."""


class CacheMismatch(EulerphiError):
    """On-disk table does not match the requested spec / size / mode."""


# --- decomposition --------------------------------------------------------

class MBeyondTable(EulerphiError):
    """Series truncation M beyond the tabulated range."""


class MSmallerThanX(EulerphiError):
    """Series truncation M below x, where the tail substitution is invalid."""


class XBelowN(EulerphiError):
    """Fractional-part integral requested on an empty interval (x < n)."""


class XBelowOne(EulerphiError):
    """Operation only valid for x >= 1."""


class NonPositiveX(EulerphiError):
    """Operation only valid for x > 0."""


# --- volterra ---------------------------------------------------------------

class BadGrid(EulerphiError):
    """Grid construction violates the half-offset / integer-avoidance invariant."""


class AnchorOutOfRange(EulerphiError):
    """Solver anchor x0 outside (0, X]."""


class NotIntegrableNearZero(EulerphiError):
    """Heuristic O(t) check near zero failed for the improper integral."""


class NotHomogeneous(EulerphiError):
    """Candidate fails the homogeneous-equation residual pre-check."""


class XBeyondGrid(EulerphiError):
    """Evaluation point beyond the grid's right endpoint."""


# --- cli ---------------------------------------------------------------------

class UsageError(EulerphiError):
    """Malformed flags or config file."""


class IoError(EulerphiError):
    """Output path not writable or input file unreadable."""
