"""Euclidean metric decorations of triangulations.

A decoration assigns a 3D point to every vertex; edge lengths, signed
volumes and angles are induced from it.  Genericity (no tetrahedron flatter
than ``vol_floor``) is enforced when decorations are sampled, which keeps
finite-difference derivatives downstream well-conditioned.

Angle conventions:

* ``dihedral_unsigned`` is the interior dihedral angle in (0, pi), computed
  by re-embedding the tetrahedron from its six lengths (robust near
  degenerate faces, no acos of Gram quotients).
* ``dihedral_signed`` multiplies by the orientation sign of the decorated
  tetrahedron, so that angles around an edge of a flat star close up to a
  multiple of 2*pi regardless of how tuples are oriented.
* the deficit angle of an edge is 2*pi minus the sum of unsigned dihedral
  angles of its star (the discrete-gravity convention); the global variant
  sums signed angles and reduces mod 2*pi into (-pi, pi].
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateConfiguration, GenericityFailed, NotRealizable
from .simplicial import Triangulation

TWO_PI = 2.0 * math.pi

DEFAULT_VOL_FLOOR_REL = 1e-6   # vol_floor = 1e-6 * scale^3 unless overridden
ANGLE_TOL = 1e-10              # relative face/volume degeneracy tolerance


@dataclass(frozen=True)
class Decoration:
    """Immutable map vertex label -> point in 3-space."""

    coords: dict

    def point(self, v: str):
        return self.coords[v]

    def __contains__(self, v):
        return v in self.coords

    def labels(self):
        return tuple(self.coords)

    def array_for(self, labels) -> np.ndarray:
        return np.array([self.coords[v] for v in labels], dtype=float)


def decoration_from_coords(coords) -> Decoration:
    clean = {}
    for v, xyz in coords.items():
        arr = tuple(float(c) for c in xyz)
        if len(arr) != 3 or not all(math.isfinite(c) for c in arr):
            raise DegenerateConfiguration(f"bad coordinates for {v!r}: {xyz!r}")
        clean[str(v)] = arr
    return Decoration(clean)


def volume_signed(dec: Decoration, tet) -> float:
    """Signed volume det[Q-P, R-P, S-P]/6 of a decorated vertex 4-tuple."""
    p, q, r, s = (dec.coords[v] for v in tet)
    return kernels.volume_signed(p, q, r, s)


def orientation_sign(dec: Decoration, tet) -> float:
    return 1.0 if volume_signed(dec, tet) >= 0.0 else -1.0


def decorate_random(tri: Triangulation, seed: int, scale: float = 1.0,
                    vol_floor: float | None = None,
                    max_retries: int = 200) -> Decoration:
    """Uniform coordinates in a cube of side `scale`, resampled until every
    tetrahedron satisfies |signed volume| >= vol_floor.  Deterministic given
    (tri, seed, scale)."""
    if vol_floor is None:
        vol_floor = DEFAULT_VOL_FLOOR_REL * scale ** 3
    rng = np.random.default_rng(seed)
    n = len(tri.vertices)
    for _ in range(max_retries):
        pts = rng.uniform(-scale / 2.0, scale / 2.0, size=(n, 3))
        coords = {v: tuple(pts[i]) for i, v in enumerate(tri.vertices)}
        dec = Decoration(coords)
        if all(abs(volume_signed(dec, t)) >= vol_floor for t in tri.tets):
            return dec
    raise GenericityFailed(
        f"no decoration with min |volume| >= {vol_floor:g} in {max_retries} tries")


def decorate_extend(dec: Decoration, new_vertex: str, tet,
                    seed: int = 0, bary_floor: float = 0.05) -> Decoration:
    """Place a new vertex strictly inside a decorated tetrahedron.

    Barycentric coordinates are random with every component >= bary_floor,
    so each of the four sub-tetrahedra keeps at least that fraction of the
    parent volume.  Raises GenericityFailed for a degenerate parent.
    """
    new_vertex = str(new_vertex)
    pts = dec.array_for(tet)
    vol = kernels.volume_signed(*pts)
    lrms = math.sqrt(sum(
        float(np.dot(pts[j] - pts[i], pts[j] - pts[i]))
        for i, j in kernels.EDGE_ORDER) / 6.0)
    if abs(vol) <= 1e-12 * lrms ** 3:
        raise GenericityFailed(f"parent tetrahedron {tet} is degenerate")
    rng = np.random.default_rng(seed)
    lam = bary_floor + (1.0 - 4.0 * bary_floor) * rng.dirichlet(np.ones(4))
    new_pt = tuple(float(x) for x in lam @ pts)
    coords = dict(dec.coords)
    coords[new_vertex] = new_pt
    return Decoration(coords)


def lengths_of(tri: Triangulation, dec: Decoration) -> dict:
    """Euclidean length of every edge, keyed by the sorted label pair."""
    out = {}
    for u, v in tri.edges:
        pu, pv = dec.coords[u], dec.coords[v]
        out[(u, v)] = math.dist(pu, pv)
    return out


def tet_lengths(tet, lengths: dict):
    """The six lengths of a tetrahedron in local edge order (see kernels)."""
    return tuple(
        lengths[tuple(sorted((tet[i], tet[j])))] for i, j in kernels.EDGE_ORDER)


def tet_lengths_from_coords(dec: Decoration, tet):
    pts = [dec.coords[v] for v in tet]
    return tuple(math.dist(pts[i], pts[j]) for i, j in kernels.EDGE_ORDER)


def validate_lengths(tri: Triangulation, lengths: dict, tol: float = ANGLE_TOL):
    """Check positivity and per-tetrahedron Cayley-Menger realizability."""
    for e, l in lengths.items():
        if not (l > 0.0 and math.isfinite(l)):
            raise NotRealizable(f"edge {e} has non-positive length {l!r}")
    for t in tri.tets:
        kernels.volume_from_lengths(tet_lengths(t, lengths), tol)


def volume_cm(l, tol: float = ANGLE_TOL) -> float:
    """Volume from six lengths via the Cayley-Menger determinant (>= 0)."""
    return kernels.volume_from_lengths(tuple(float(x) for x in l), tol)


def _local_edge_index(tet, e):
    u, v = str(e[0]), str(e[1])
    return kernels.pair_index(tet.index(u), tet.index(v))


def dihedral_unsigned(l, e, tol: float = ANGLE_TOL) -> float:
    """Interior dihedral angle at edge `e` of the tetrahedron with lengths `l`.

    `e` is a local vertex-index pair (i, j) or an edge index 0..5 in the
    order of ``kernels.EDGE_ORDER``.
    """
    k = e if isinstance(e, int) else kernels.pair_index(int(e[0]), int(e[1]))
    return kernels.dihedral_at_edge(tuple(float(x) for x in l), k, tol)


def dihedral_in_tet(tet, lengths: dict, e, tol: float = ANGLE_TOL) -> float:
    """Dihedral angle at labeled edge `e` of labeled tetrahedron `tet`."""
    return kernels.dihedral_at_edge(
        tet_lengths(tet, lengths), _local_edge_index(tet, e), tol)


def dihedral_signed(dec: Decoration, tet, e, tol: float = ANGLE_TOL) -> float:
    """Orientation-signed dihedral angle of a decorated tetrahedron."""
    l = tet_lengths_from_coords(dec, tet)
    theta = kernels.dihedral_at_edge(l, _local_edge_index(tet, e), tol)
    return orientation_sign(dec, tet) * theta


def deficit_local(tri: Triangulation, lengths: dict, e,
                  tol: float = ANGLE_TOL) -> float:
    """Deficit angle 2*pi - sum of unsigned dihedral angles around edge e.

    A pure function of the lengths of the star of e; the star tets need not
    embed around the edge simultaneously.
    """
    u, v = sorted((str(e[0]), str(e[1])))
    total = 0.0
    for i in tri.tets_of_edge(u, v):
        total += dihedral_in_tet(tri.tets[i], lengths, (u, v), tol)
    return TWO_PI - total


def deficit_global_mod2pi(tri: Triangulation, dec: Decoration, e,
                          tol: float = ANGLE_TOL) -> float:
    """Minus the signed angle sum around e, reduced mod 2*pi into (-pi, pi]."""
    u, v = sorted((str(e[0]), str(e[1])))
    total = 0.0
    for i in tri.tets_of_edge(u, v):
        total += dihedral_signed(dec, tri.tets[i], (u, v), tol)
    r = math.remainder(-total, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r
