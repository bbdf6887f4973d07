"""Exception hierarchy shared by all polysfem modules."""


class PolySfemError(Exception):
    """Base class for library errors."""


class MeshLoadError(PolySfemError, ValueError):
    """Mesh file could not be parsed or failed validation.

    ``element`` holds the offending element id when known.
    """

    def __init__(self, message, element=None):
        super().__init__(message if element is None else f"element {element}: {message}")
        self.element = element


class DegenerateElementError(MeshLoadError):
    """Element (or subcell) with vanishing area/volume or repeated nodes."""


class UnsupportedFaceError(PolySfemError, ValueError):
    """Face geometry not admissible for the requested interpolant/quadrature."""


class OutOfDomainError(PolySfemError, ValueError):
    """Evaluation point lies outside the polygon."""


class RankDeficientError(PolySfemError, ValueError):
    """Modal matrix T does not have full column rank."""


class InvalidScalingCentreError(PolySfemError, ValueError):
    """Part of the boundary is not visible from the scaling centre."""


class JacobianError(PolySfemError, ValueError):
    """Non-positive Jacobian determinant at a quadrature point."""


class ModalSelectionError(PolySfemError, ArithmeticError):
    """SBFEM modal displacement matrix is singular or badly conditioned."""


class NoSingularModeError(PolySfemError, ArithmeticError):
    """No eigenvalue with -1 < Re(lambda) < 0 found (element is not cracked)."""


class ConstraintDeficiencyError(PolySfemError, ArithmeticError):
    """Global system singular after applying constraints."""

    def __init__(self, message, zero_modes=0):
        super().__init__(message)
        self.zero_modes = zero_modes


class FormulaRangeError(PolySfemError, ValueError):
    """Empirical formula evaluated outside its range of validity."""
