"""Exception types shared across the package."""


class QresError(Exception):
    """Base class for all qres errors."""


class ParseError(QresError):
    """Malformed FCIDUMP header or body."""


class IndexOutOfRangeError(QresError, IndexError):
    """Orbital index outside the range declared in the header."""


class ConsistencyError(QresError):
    """Conflicting duplicate entries or violated tensor symmetry."""


class DimensionError(QresError):
    """Operands defined on different qubit counts."""


class KindError(QresError):
    """Fragment kind does not match the requested operation."""


class NormalizationError(QresError):
    """State vector is not normalized where a normalized one is required."""


class SolverError(QresError):
    """Eigensolver failed to converge within its restart budget."""


class SymmetryError(QresError):
    """Claimed symmetry operator fails to commute with the Hamiltonian."""


class OrthogonalityError(QresError):
    """Matrix expected to be orthogonal is not."""


class ArgumentError(QresError, ValueError):
    """Invalid scalar argument (nonpositive epsilon, empty list, ...)."""


class StateError(QresError):
    """Object is missing a prerequisite (e.g. fragment without diagonalizer)."""


class PoolError(QresError):
    """Generator pool is empty."""
