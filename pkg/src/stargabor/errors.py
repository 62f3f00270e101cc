"""Exception taxonomy shared across the package."""


class StarGaborError(Exception):
    """Base class for all library-specific failures."""


class NotInvertible(StarGaborError):
    """A residue has no multiplicative inverse mod L."""


class EmptyResult(StarGaborError):
    """A dimension search produced no admissible candidates."""


class AdmissibilityError(StarGaborError):
    """The ambient dimension violates the admissibility conditions."""


class ConvergenceError(StarGaborError):
    """An iterative eigenvector method failed to converge."""


class NotOrderThree(StarGaborError):
    """The cubed unitary is not a scalar multiple of the identity."""


class DimensionMismatch(StarGaborError):
    """Vector or grid sizes are inconsistent with the lattice."""


class InvalidLattice(StarGaborError):
    """Lattice parameters do not divide L or violate oversampling."""


class NonRealInput(StarGaborError):
    """A real-mode transform received a signal with imaginary content."""


class ModeMismatch(StarGaborError):
    """Full-mode operation applied to real-mode coefficients (or vice versa)."""


class TooLarge(StarGaborError):
    """A brute-force enumeration or dense oracle exceeds its size budget."""


class ZeroSignal(StarGaborError):
    """An operation requires a nonzero input signal."""


class NotConverged(StarGaborError):
    """A solver hit its iteration budget without meeting its tolerance."""


class AdjointMismatch(StarGaborError):
    """Forward/adjoint operator pair failed the inner-product probe check."""


class UnsupportedFormat(StarGaborError):
    """WAV file is not mono 16-bit PCM."""


class CorruptHeader(StarGaborError):
    """WAV file header cannot be parsed."""


class CacheFormatError(StarGaborError):
    """A window cache file has a bad magic, version, or size."""
