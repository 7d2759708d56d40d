"""Exception types shared across the package."""


class SymorbitError(Exception):
    """Base class for all package-specific errors."""


class ClosureOverflow(SymorbitError):
    """Group closure exceeded the element cap (infinite or unintended group)."""


class UnknownName(SymorbitError):
    """Requested a group name that is not in the catalog."""


class IncompatibleMasses(SymorbitError):
    """Masses are not constant on the orbits of the index permutation action."""


class NotTypeR(SymorbitError):
    """Operation requires the time/plane orientation characters to coincide."""


class IrrationalFrame(SymorbitError):
    """Rotating-frame change requires a rational angular velocity."""


class NotCoercive(SymorbitError):
    """Restricted action functional has no minimum (kinetic form degenerates)."""


class CollisionOnGrid(SymorbitError):
    """Loop passes through (or too close to) a collision on the sample grid."""


class RootNotBracketed(SymorbitError):
    """One-dimensional root search found no sign change on the search interval."""


class OmegaInteger(SymorbitError):
    """Closed-form minimum undefined at integer angular velocity."""


class DegenerateFrequency(SymorbitError):
    """Circular test path degenerates when the winding equals the frame speed."""


class GeometryViolated(SymorbitError):
    """Test-path geometry constraint 0 < R < 3d violated."""


class ThetaOutOfRange(SymorbitError):
    """Angular kernel evaluated outside its domain (0, 2*pi)."""


class SeriesDiverges(SymorbitError):
    """Series representation unusable: |cos(theta)| too close to 1."""


class ZeroSeparation(SymorbitError):
    """Separation vector vanishes; the kernel scale is undefined."""


class NonEquivariantDelta(SymorbitError):
    """Variation vector is not fixed by the boundary symmetry g0."""


class GridTooCoarse(SymorbitError):
    """Graded quadrature mesh failed its self-consistency refinement check."""


class SchemaError(SymorbitError):
    """Orbit file is missing fields or has malformed values."""


class ChecksumMismatch(SymorbitError):
    """Orbit file contents do not match the stored checksum."""
