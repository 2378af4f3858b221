"""Derivatives of angles in edge lengths and the deficit-angle Jacobian.

All derivatives are central finite differences with one Richardson step:
with relative step h, the slope is evaluated at steps h*l and h*l/2 and
extrapolated, which cancels the leading O(h^2) error.  The two step sizes
also provide a consistency estimate; a derivative whose step-halving
discrepancy exceeds tolerance raises StepUnstable instead of returning
garbage.

The Jacobian A has entries a[e][f] = d(deficit at edge e)/d(length of f),
assembled tetrahedron by tetrahedron with orientation signs taken from the
decoration.  The per-tetrahedron Schlafli identity (sum of l_e * dtheta_e
over the edges of a tetrahedron vanishes for any deformation) makes A
symmetric, and length deformations induced by vertex motions lie in its
kernel; both facts are checked numerically here.

``local_formula_check`` verifies the bipyramid volume identity

    V_ABCD * V_EABC = -6 * V_ABED * V_BCED * V_CAED * a / |DE|^2

where a is the derivative of the deficit angle around the edge DE of the
three-tetrahedron star in its own length, holding the other nine lengths
fixed.  With the deficit convention 2*pi minus the angle sum and the vertex
orders as written, the identity holds with the minus sign as stated and
a < 0 on convex bipyramids (confirmed against the finite-difference oracle
on the symmetric configuration; see the tests).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DegenerateConfiguration,
    NotBipyramid,
    SamplingFailed,
    StepUnstable,
)
from .geometry import (
    ANGLE_TOL,
    Decoration,
    decoration_from_coords,
    lengths_of,
    orientation_sign,
    tet_lengths,
    tet_lengths_from_coords,
    volume_signed,
)
from .simplicial import Triangulation

DEFAULT_FD_STEP = 1e-4
DEFAULT_FD_TOL = 1e-6


@dataclass(frozen=True)
class DerivativeReport:
    """A finite-difference derivative with its step diagnostics.

    Central differences are taken at steps `step`, `step`/2 and `step`/4 and
    Richardson-extrapolated pairwise; `value` is the finer extrapolation and
    `discrepancy` = |richardson_fine - richardson_coarse| estimates its
    error (the raw O(h^2) error cancels, so the two extrapolations agree
    unless the step is genuinely unstable for the configuration).
    """

    value: float
    step: float
    richardson_coarse: float
    richardson_fine: float
    discrepancy: float


def _edge_index(e) -> int:
    return e if isinstance(e, int) else kernels.pair_index(int(e[0]), int(e[1]))


def _richardson_pair(slope, s):
    """Two Richardson extrapolations of central differences at s, s/2, s/4."""
    d1 = slope(s)
    d2 = slope(s / 2.0)
    d4 = slope(s / 4.0)
    r_coarse = (4.0 * d2 - d1) / 3.0
    r_fine = (4.0 * d4 - d2) / 3.0
    return r_coarse, r_fine


def dtheta_dl(l, e, f, h: float = DEFAULT_FD_STEP,
              tol: float = DEFAULT_FD_TOL) -> DerivativeReport:
    """d(dihedral angle at edge e)/d(length of edge f) for one tetrahedron.

    Raises StepUnstable when the two Richardson extrapolations disagree by
    more than tol * max(1, |value|), and NotRealizable when a perturbed
    length set leaves the realizable cone.
    """
    l = [float(x) for x in l]
    ke, kf = _edge_index(e), _edge_index(f)
    s = h * l[kf]

    def slope(step):
        lp, lm = list(l), list(l)
        lp[kf] += step
        lm[kf] -= step
        return (kernels.dihedral_at_edge(lp, ke, ANGLE_TOL)
                - kernels.dihedral_at_edge(lm, ke, ANGLE_TOL)) / (2.0 * step)

    r_coarse, r_fine = _richardson_pair(slope, s)
    discrepancy = abs(r_fine - r_coarse)
    if discrepancy > tol * max(1.0, abs(r_fine)):
        raise StepUnstable(
            f"dtheta/dl at edges ({ke},{kf}): Richardson discrepancy "
            f"{discrepancy:g} exceeds {tol:g}*max(1,|{r_fine:g}|)")
    return DerivativeReport(r_fine, s, r_coarse, r_fine, discrepancy)


def dtheta_matrix(l, h: float = DEFAULT_FD_STEP,
                  tol: float = DEFAULT_FD_TOL) -> np.ndarray:
    """6x6 matrix M[e, f] = dtheta_e/dl_f for one tetrahedron.

    Same scheme as dtheta_dl but batched: each perturbed length set is
    embedded once and all six angles read off together.
    """
    l = [float(x) for x in l]
    m = np.empty((6, 6))
    for kf in range(6):
        s = h * l[kf]

        def slope(step):
            lp, lm = list(l), list(l)
            lp[kf] += step
            lm[kf] -= step
            return (np.array(kernels.dihedral_all(lp, ANGLE_TOL))
                    - np.array(kernels.dihedral_all(lm, ANGLE_TOL))) / (2.0 * step)

        r_coarse, r_fine = _richardson_pair(slope, s)
        bad = np.abs(r_fine - r_coarse) > tol * np.maximum(1.0, np.abs(r_fine))
        if np.any(bad):
            ke = int(np.nonzero(bad)[0][0])
            raise StepUnstable(
                f"dtheta/dl at edges ({ke},{kf}): Richardson discrepancy "
                f"{abs(r_fine[ke] - r_coarse[ke]):g} exceeds tolerance {tol:g}")
        m[:, kf] = r_fine
    return m


def schlafli_residual(l, h: float = DEFAULT_FD_STEP,
                      tol: float = DEFAULT_FD_TOL) -> float:
    """Largest relative violation of the Schlafli identity for one tetrahedron.

    For each direction f this is |sum_e l_e dtheta_e/dl_f| measured relative
    to sum_e l_e |dtheta_e/dl_f|; the identity says the numerator vanishes.
    """
    l = np.array([float(x) for x in l])
    m = dtheta_matrix(l, h, tol)
    num = np.abs(l @ m)
    den = np.abs(l) @ np.abs(m)
    return float(np.max(num / den))


# ---------------------------------------------------------------------------
# global Jacobian
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JacobianA:
    """Dense edge-by-edge matrix of deficit-angle derivatives.

    a[i, j] = d(deficit at edges[i])/d(length of edges[j]) at the decoration
    the matrix was assembled from.  Norms here are entrywise max norms.
    """

    edges: tuple
    a: np.ndarray
    fd_step: float
    method: str = "central-richardson"

    @property
    def symmetry_defect(self) -> float:
        scale = float(np.max(np.abs(self.a)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.a - self.a.T))) / scale


def deficit_derivative(tri: Triangulation, dec: Decoration, e, f,
                       h: float = DEFAULT_FD_STEP,
                       tol: float = DEFAULT_FD_TOL) -> float:
    """a_ef = -sum over tets containing e of (orientation sign) * dtheta_e/dl_f.

    Zero when e and f do not cobound a tetrahedron.  Equal to the derivative
    of the deficit angle at e in the length of f (for either deficit sign
    convention, since constants drop).
    """
    u, v = sorted((str(e[0]), str(e[1])))
    fu, fv = sorted((str(f[0]), str(f[1])))
    lengths = None
    total = 0.0
    for i in tri.tets_of_edge(u, v):
        tet = tri.tets[i]
        if fu not in tet or fv not in tet:
            continue
        if lengths is None:
            lengths = lengths_of(tri, dec)
        ke = kernels.pair_index(tet.index(u), tet.index(v))
        kf = kernels.pair_index(tet.index(fu), tet.index(fv))
        report = dtheta_dl(tet_lengths(tet, lengths), ke, kf, h, tol)
        total += orientation_sign(dec, tet) * report.value
    return -total


def assemble_jacobian(tri: Triangulation, dec: Decoration,
                      h: float = DEFAULT_FD_STEP,
                      tol: float = DEFAULT_FD_TOL) -> JacobianA:
    """The full deficit-angle Jacobian, assembled tetrahedron by tetrahedron."""
    index = tri.edge_index
    n = len(tri.edges)
    a = np.zeros((n, n))
    lengths = lengths_of(tri, dec)
    for tet in tri.tets:
        l6 = tet_lengths(tet, lengths)
        try:
            m = dtheta_matrix(l6, h, tol)
        except StepUnstable as err:
            raise StepUnstable(f"tetrahedron {tet}: {err}") from err
        sign = orientation_sign(dec, tet)
        globals_ = [
            index[tuple(sorted((tet[i], tet[j])))] for i, j in kernels.EDGE_ORDER]
        for le, ge in enumerate(globals_):
            for lf, gf in enumerate(globals_):
                a[ge, gf] -= sign * m[le, lf]
    a.setflags(write=False)
    return JacobianA(edges=tri.edges, a=a, fd_step=h)


def length_differential(tri: Triangulation, dec: Decoration) -> np.ndarray:
    """The E x 3V differential of the coords -> lengths map at `dec`."""
    vindex = {v: i for i, v in enumerate(tri.vertices)}
    out = np.zeros((len(tri.edges), 3 * len(tri.vertices)))
    for row, (u, v) in enumerate(tri.edges):
        pu = np.asarray(dec.coords[u])
        pv = np.asarray(dec.coords[v])
        unit = (pu - pv) / np.linalg.norm(pu - pv)
        out[row, 3 * vindex[u]: 3 * vindex[u] + 3] = unit
        out[row, 3 * vindex[v]: 3 * vindex[v] + 3] = -unit
    return out


def motion_generators(tri: Triangulation, dec: Decoration) -> np.ndarray:
    """3V x 6 matrix of rigid-motion vertex velocities (3 translations,
    3 rotations about the coordinate axes) evaluated at the decoration."""
    n = len(tri.vertices)
    gens = np.zeros((3 * n, 6))
    for i, v in enumerate(tri.vertices):
        x = np.asarray(dec.coords[v])
        for axis in range(3):
            gens[3 * i + axis, axis] = 1.0
        for axis in range(3):
            omega = np.zeros(3)
            omega[axis] = 1.0
            gens[3 * i: 3 * i + 3, 3 + axis] = np.cross(omega, x)
    return gens


def motion_kernel_check(tri: Triangulation, dec: Decoration,
                        jac: JacobianA | None = None,
                        h: float = DEFAULT_FD_STEP,
                        floor: float = 1e-30) -> float:
    """Worst normalized |A . (L v)| over all unit vertex displacements v.

    Length deformations induced by moving vertices must lie in the kernel of
    A; the return value is max over the 3V coordinate directions of
    ||A L v||_max / (||A||_max ||L v||_2 + floor).
    """
    if jac is None:
        jac = assemble_jacobian(tri, dec, h)
    lmat = length_differential(tri, dec)
    prod = jac.a @ lmat
    anorm = float(np.max(np.abs(jac.a)))
    col_resid = np.max(np.abs(prod), axis=0)
    col_scale = anorm * np.linalg.norm(lmat, axis=0) + floor
    return float(np.max(col_resid / col_scale))


# ---------------------------------------------------------------------------
# the 2 -> 3 volume identity
# ---------------------------------------------------------------------------

# the three tetrahedra produced by a 2-3 move, and the five whose volumes
# enter the identity, written in the fixed vertex orders
STAR_TETS = (("A", "B", "E", "D"), ("B", "C", "E", "D"), ("C", "A", "E", "D"))
IDENTITY_TETS = (("A", "B", "C", "D"), ("E", "A", "B", "C")) + STAR_TETS


@dataclass(frozen=True)
class LocalFormulaReport:
    """Both sides of the bipyramid volume identity and their residual."""

    lhs: float
    rhs: float
    deficit_slope: float
    edge_length: float
    residual: float


def _as_five_points(coords):
    if isinstance(coords, dict):
        pts = {str(k): np.asarray(v, dtype=float) for k, v in coords.items()}
        if set(pts) != set("ABCDE"):
            raise DegenerateConfiguration(
                f"expected points labeled A..E, got {sorted(pts)}")
        return pts
    arr = np.asarray(coords, dtype=float)
    if arr.shape != (5, 3):
        raise DegenerateConfiguration(f"expected 5 points in 3-space, got {arr.shape}")
    return {label: arr[i] for i, label in enumerate("ABCDE")}


def crossing_barycentrics(pts) -> np.ndarray:
    """Barycentric coordinates (w.r.t. A, B, C) of the point where segment DE
    crosses the plane of ABC.  Raises NotBipyramid if it does not cross."""
    a, b, c, d, e = (pts[k] for k in "ABCDE")
    n = np.cross(b - a, c - a)
    hd = float(np.dot(n, d - a))
    he = float(np.dot(n, e - a))
    if hd == 0.0 or he == 0.0 or (hd > 0.0) == (he > 0.0):
        raise NotBipyramid("segment DE does not cross the plane of ABC")
    p = d + (hd / (hd - he)) * (e - d)
    nn = float(np.dot(n, n))
    lam = np.array([
        np.dot(np.cross(c - b, p - b), n) / nn,
        np.dot(np.cross(a - c, p - c), n) / nn,
        np.dot(np.cross(b - a, p - a), n) / nn,
    ])
    if np.min(lam) <= 0.0:
        raise NotBipyramid(
            f"DE crosses the ABC plane outside the triangle (barycentrics {lam})")
    return lam


def local_formula_check(coords, h: float = DEFAULT_FD_STEP,
                        tol: float = DEFAULT_FD_TOL,
                        vol_floor_rel: float = 1e-9) -> LocalFormulaReport:
    """Check V_ABCD * V_EABC = -6 V_ABED V_BCED V_CAED * a / |DE|^2.

    `a` is the deficit-angle derivative at the interior edge DE of the
    three-tetrahedron star, taken purely in length space (the other nine
    lengths held fixed).  Returns the relative residual report; raises
    NotBipyramid or DegenerateConfiguration for inadmissible configurations.
    """
    pts = _as_five_points(coords)
    dec = decoration_from_coords({k: tuple(v) for k, v in pts.items()})

    lrms = math.sqrt(np.mean([
        float(np.dot(pts[u] - pts[v], pts[u] - pts[v]))
        for u in "ABCDE" for v in "ABCDE" if u < v]))
    vols = {t: volume_signed(dec, t) for t in IDENTITY_TETS}
    for t, vol in vols.items():
        if abs(vol) <= vol_floor_rel * lrms ** 3:
            raise DegenerateConfiguration(
                f"tetrahedron {''.join(t)} is flat (volume {vol:g})")
    crossing_barycentrics(pts)

    l_de = math.dist(pts["D"], pts["E"])
    star_lengths = [list(tet_lengths_from_coords(dec, t)) for t in STAR_TETS]
    star_signs = [orientation_sign(dec, t) for t in STAR_TETS]
    k_de = [_star_de_index(t) for t in STAR_TETS]

    def deficit_slope_at(step):
        def signed_sum(dl):
            total = 0.0
            for l6, sign, k in zip(star_lengths, star_signs, k_de):
                ll = list(l6)
                ll[k] = l_de + dl
                total += sign * kernels.dihedral_at_edge(ll, k, ANGLE_TOL)
            return total
        return -(signed_sum(step) - signed_sum(-step)) / (2.0 * step)

    r_coarse, r_fine = _richardson_pair(deficit_slope_at, h * l_de)
    a = r_fine
    if abs(r_fine - r_coarse) > tol * max(1.0, abs(a)):
        raise StepUnstable(
            f"deficit slope at DE: Richardson discrepancy {abs(r_fine - r_coarse):g}")

    lhs = vols[("A", "B", "C", "D")] * vols[("E", "A", "B", "C")]
    rhs = (-6.0 * vols[("A", "B", "E", "D")] * vols[("B", "C", "E", "D")]
           * vols[("C", "A", "E", "D")] * a / l_de ** 2)
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return LocalFormulaReport(lhs=lhs, rhs=rhs, deficit_slope=a,
                              edge_length=l_de, residual=residual)


def _star_de_index(tet) -> int:
    i, j = tet.index("D"), tet.index("E")
    return kernels.pair_index(i, j)


def sample_bipyramid(seed: int, max_retries: int = 20000,
                     bary_margin: float = 0.05,
                     dihedral_margin: float = 0.12) -> dict:
    """A random five-point configuration where DE crosses the interior of ABC.

    Rejection sampling from the unit cube: D strictly above and E strictly
    below the oriented plane of ABC, crossing-point barycentrics all at
    least `bary_margin`, all five identity tetrahedra non-flat, and every
    dihedral angle at least `dihedral_margin` away from 0 and pi (slivers
    make the angle derivatives too curved for stable default-step finite
    differences).  Deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        arr = rng.uniform(-1.0, 1.0, size=(5, 3))
        pts = {label: arr[i] for i, label in enumerate("ABCDE")}
        a, b, c, d, e = (pts[k] for k in "ABCDE")
        n = np.cross(b - a, c - a)
        area2 = float(np.linalg.norm(n))
        if area2 < 0.4:
            continue
        nhat = n / area2
        hd = float(np.dot(nhat, d - a))
        he = float(np.dot(nhat, e - a))
        if not (hd > 0.15 and he < -0.15):
            continue
        try:
            lam = crossing_barycentrics(pts)
        except NotBipyramid:
            continue
        if float(np.min(lam)) < bary_margin:
            continue
        dec = decoration_from_coords({k: tuple(v) for k, v in pts.items()})
        lrms = math.sqrt(np.mean([
            float(np.dot(pts[u] - pts[v], pts[u] - pts[v]))
            for u in "ABCDE" for v in "ABCDE" if u < v]))
        if any(abs(volume_signed(dec, t)) < 2e-3 * lrms ** 3
               for t in IDENTITY_TETS):
            continue
        angles = [ang for t in IDENTITY_TETS
                  for ang in kernels.dihedral_all(tet_lengths_from_coords(dec, t))]
        if min(angles) < dihedral_margin or max(angles) > math.pi - dihedral_margin:
            continue
        return {k: tuple(float(x) for x in v) for k, v in pts.items()}
    raise SamplingFailed(f"no admissible bipyramid in {max_retries} draws (seed={seed})")
