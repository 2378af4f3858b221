"""Exception types raised across the workbench.

Every error is a subclass of :class:`PachnerLabError`, grouped here so the CLI
can map them onto exit codes without importing every module.
"""


class PachnerLabError(Exception):
    """Base class for all workbench errors."""


# --- triangulation construction / queries ---------------------------------

class DegenerateTet(PachnerLabError):
    """A tetrahedron tuple has a repeated vertex."""


class DuplicateTet(PachnerLabError):
    """Two tetrahedra have the same vertex set."""


class NonManifoldTriangle(PachnerLabError):
    """A triangle is shared by three or more tetrahedra."""


class InconsistentOrientation(PachnerLabError):
    """A shared triangle is induced with equal orientation by both tetrahedra."""


class EdgeNotFound(PachnerLabError):
    """Queried edge is not in the triangulation."""


class StarNotCyclic(PachnerLabError):
    """Tetrahedra around an edge do not chain into a single fan or cycle."""


# --- Pachner moves ---------------------------------------------------------

class EdgeAlreadyPresent(PachnerLabError):
    """The apex edge a 2-3 move would create already exists."""


class SiteStale(PachnerLabError):
    """A move site refers to simplices no longer in the triangulation."""


class WrongValence(PachnerLabError):
    """Edge valence does not match what the move requires."""


class WrongLinkValence(PachnerLabError):
    """Vertex is not contained in exactly four tetrahedra."""


class PatternMismatch(PachnerLabError):
    """Local configuration does not match the move's consumption pattern."""


class TetAlreadyPresent(PachnerLabError):
    """A tetrahedron the move would create already exists."""


class LabelInUse(PachnerLabError):
    """New vertex label collides with an existing one."""


class TetNotFound(PachnerLabError):
    """Referenced tetrahedron is not in the triangulation."""


class MoveScriptError(PachnerLabError):
    """A scripted move failed; carries the script index and the cause."""

    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"move script failed at index {index}: {cause}")


# --- metric decorations ----------------------------------------------------

class GenericityFailed(PachnerLabError):
    """Could not find coordinates keeping all tetrahedra non-degenerate."""


class NotRealizable(PachnerLabError):
    """Six lengths do not embed as a non-degenerate Euclidean tetrahedron."""


class DegenerateFace(PachnerLabError):
    """A triangular face has area below tolerance."""


class NotBipyramid(PachnerLabError):
    """Segment DE does not cross the interior of triangle ABC."""


class DegenerateConfiguration(PachnerLabError):
    """A five-point configuration contains a near-flat tetrahedron."""


class SamplingFailed(PachnerLabError):
    """Rejection sampling exhausted its retry budget."""


# --- derivatives -----------------------------------------------------------

class StepUnstable(PachnerLabError):
    """Finite-difference step halving disagrees beyond tolerance."""


# --- chain complexes -------------------------------------------------------

class ShapeMismatch(PachnerLabError):
    """Boundary matrix shapes are inconsistent with the dimension list."""


class NotAChainComplex(PachnerLabError):
    """Some composite of consecutive boundary maps is not numerically zero."""


class NotAcyclic(PachnerLabError):
    """Complex fails the numerical acyclicity test."""


class SingularMinor(PachnerLabError):
    """Basis-subset selection exhausted without nonsingular minors."""


class ChainConditionFailed(PachnerLabError):
    """A composite map of the deformation complex is not numerically zero."""


# --- CLI -------------------------------------------------------------------

class UnknownSeed(PachnerLabError):
    """Seed triangulation name not recognized."""
