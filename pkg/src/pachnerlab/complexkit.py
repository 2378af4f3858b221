"""Based chain complexes over the reals, their torsion, and the experimental
deformation complex of a decorated triangulation.

A based complex stores the dimension list of its spaces from left to right,

    C_m -> C_{m-1} -> ... -> C_0,

as ``dims`` together with ``boundaries``, where ``boundaries[k]`` is the
matrix of the map out of the space with dimension ``dims[k]`` (so its shape
is (dims[k+1], dims[k])).  Spaces are based by their coordinate bases, which
makes determinants of minors well-defined.

Torsion of a numerically acyclic complex: choose a subset of basis indices
for every space, of size equal to the rank of the map out of it (empty for
the last space); the minor of each boundary on (rows = complement of the
next space's subset, columns = this space's subset) is square and
nonsingular, and the torsion is the alternating product of their
determinants.  Its absolute value does not depend on the choices; the sign
does, so it is reported together with the subsets that produced it.

The deformation complex packages the deficit-angle Jacobian A as the middle
map of the 4-term complex

    0 -> R^{3V-6} --LQ--> R^E --A--> R^E --(LQ)^T--> R^{3V-6} -> 0

where L is the differential of the coords -> lengths map and Q an
orthonormal basis of the complement of the rigid motions.  Only the kernel
property A(LQ) = 0 and its transpose hold, which is exactly the chain
condition.  This construction is experimental: its acyclicity and any
move-invariant normalization of its torsion are measured findings, not
contracts, and ``invariance_experiment`` only tabulates candidates.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ChainConditionFailed,
    DegenerateConfiguration,
    NotAChainComplex,
    NotAcyclic,
    PachnerLabError,
    ShapeMismatch,
    SingularMinor,
)
from .geometry import Decoration, decorate_extend, decorate_random, lengths_of, volume_signed
from .moves import apply_command
from .regge import assemble_jacobian, length_differential, motion_generators
from .seeding import derive_seed
from .simplicial import Triangulation, f_vector

DEFAULT_RANK_TOL = 1e-9
DEFAULT_CHAIN_TOL = 1e-10


def _maxabs(mat) -> float:
    return float(np.max(np.abs(mat))) if mat.size else 0.0


@dataclass(frozen=True)
class BasedComplex:
    """A finite chain complex of based real vector spaces."""

    dims: tuple
    boundaries: tuple
    chain_tol: float = DEFAULT_CHAIN_TOL

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    @property
    def euler(self) -> int:
        # alternating sum with the leftmost space taken positive
        return sum((-1) ** i * d for i, d in enumerate(self.dims))


def from_matrices(dims, boundaries, chain_tol: float = DEFAULT_CHAIN_TOL) -> BasedComplex:
    """Validate shapes and the chain condition d.d = 0.

    Raises ShapeMismatch, or NotAChainComplex reporting the first offending
    composite and its relative entrywise norm.
    """
    dims = tuple(int(d) for d in dims)
    if any(d < 0 for d in dims):
        raise ShapeMismatch(f"negative dimension in {dims}")
    mats = []
    for k, b in enumerate(boundaries):
        arr = np.array(b, dtype=float)
        if arr.ndim != 2:
            arr = arr.reshape(len(arr), -1) if arr.size else arr.reshape(0, 0)
        want = (dims[k + 1], dims[k])
        if arr.shape != want:
            raise ShapeMismatch(
                f"boundary {k} has shape {arr.shape}, expected {want}")
        arr.setflags(write=False)
        mats.append(arr)
    if len(mats) != len(dims) - 1:
        raise ShapeMismatch(
            f"{len(mats)} boundaries for {len(dims)} spaces")

    for k in range(len(mats) - 1):
        comp = mats[k + 1] @ mats[k]
        bound = _maxabs(mats[k + 1]) * _maxabs(mats[k])
        if _maxabs(comp) > chain_tol * bound:
            raise NotAChainComplex(
                f"composite of boundaries {k} and {k + 1} has entrywise norm "
                f"{_maxabs(comp):g} > {chain_tol:g} * {bound:g}")
    return BasedComplex(dims=dims, boundaries=tuple(mats), chain_tol=chain_tol)


def ranks(c: BasedComplex, tol: float = DEFAULT_RANK_TOL):
    """Numerical rank of every boundary matrix (singular values above
    tol * largest singular value)."""
    out = []
    for b in c.boundaries:
        if b.size == 0:
            out.append(0)
            continue
        sv = np.linalg.svd(b, compute_uv=False)
        out.append(int(np.sum(sv > tol * sv[0])) if sv[0] > 0.0 else 0)
    return out


@dataclass(frozen=True)
class AcyclicityReport:
    """Per-space exactness bookkeeping; truthy iff the complex is acyclic."""

    ok: bool
    dims: tuple
    ranks: tuple
    defects: tuple  # rank in + rank out - dim, per space

    def __bool__(self) -> bool:
        return self.ok


def is_acyclic(c: BasedComplex, tol: float = DEFAULT_RANK_TOL) -> AcyclicityReport:
    """Exactness at every space: rank in + rank out = dim."""
    r = ranks(c, tol)
    m = c.length
    defects = []
    for s in range(m + 1):
        rank_in = r[s - 1] if s > 0 else 0
        rank_out = r[s] if s < m else 0
        defects.append(rank_in + rank_out - c.dims[s])
    ok = all(d == 0 for d in defects)
    return AcyclicityReport(ok=ok, dims=c.dims, ranks=tuple(r),
                            defects=tuple(defects))


# ---------------------------------------------------------------------------
# torsion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorsionResult:
    """Torsion value with the subset choices and conditioning that produced it.

    The sign of `tau` is meaningful only relative to `choices` (one sorted
    index tuple per space, left to right); `abs_tau` is choice-independent.
    """

    tau: float
    abs_tau: float
    choices: tuple
    min_abs_det: float
    min_singular_value: float
    strategy: str


def _pivot_columns(mat: np.ndarray, k: int):
    """Greedy column selection by modified Gram-Schmidt with pivoting."""
    work = np.array(mat, dtype=float)
    chosen = []
    avail = list(range(work.shape[1]))
    for _ in range(k):
        norms = np.sum(work[:, avail] ** 2, axis=0)
        j = avail[int(np.argmax(norms))]
        col = work[:, j]
        nrm = math.sqrt(float(np.dot(col, col)))
        if nrm == 0.0:
            break
        u = col / nrm
        chosen.append(j)
        avail.remove(j)
        if avail:
            work[:, avail] -= np.outer(u, u @ work[:, avail])
    return sorted(chosen)


def _minor_chain(c: BasedComplex, r, gamma):
    """The square minors of every boundary for given subset choices.

    gamma[s] is the sorted column subset for the space s; rows of the minor
    at boundary s are the complement of gamma[s+1].
    """
    m = c.length
    minors = []
    for s in range(m):
        rows = [i for i in range(c.dims[s + 1]) if i not in set(gamma[s + 1])]
        if len(rows) != r[s] or len(gamma[s]) != r[s]:
            raise SingularMinor(
                f"subset sizes at boundary {s} ({len(rows)} rows, "
                f"{len(gamma[s])} cols) do not match rank {r[s]}")
        minors.append(c.boundaries[s][np.ix_(rows, gamma[s])]
                      if r[s] else np.zeros((0, 0)))
    return minors


def _evaluate_minors(c: BasedComplex, minors):
    """Alternating determinant product; None when some minor is singular."""
    m = c.length
    sign = 1.0
    log_abs = 0.0
    min_abs_det = math.inf
    min_sv = math.inf
    for s, minor in enumerate(minors):
        if minor.shape[0] == 0:
            continue
        sv = np.linalg.svd(minor, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] <= 1e-13 * sv[0]:
            return None
        sgn, logdet = np.linalg.slogdet(minor)
        exponent = (-1) ** (m - s + 1)   # boundary s is the map d_{m-s}
        sign *= sgn
        log_abs += exponent * logdet
        min_abs_det = min(min_abs_det, math.exp(logdet))
        min_sv = min(min_sv, float(sv[-1]))
    if not minors or min_abs_det is math.inf:
        min_abs_det = 1.0
        min_sv = 1.0
    return sign, log_abs, min_abs_det, min_sv


def torsion(c: BasedComplex, strategy: str = "greedy", seed: int = 0,
            rank_tol: float = DEFAULT_RANK_TOL,
            max_tries: int = 200) -> TorsionResult:
    """Torsion of a numerically acyclic based complex.

    strategy "greedy" picks column subsets by pivoted elimination (one
    deterministic attempt); "seeded-random" draws subsets uniformly until
    all minors are nonsingular.  Raises NotAcyclic or SingularMinor.
    """
    report = is_acyclic(c, rank_tol)
    if not report:
        raise NotAcyclic(f"complex is not acyclic: {report}")
    r = list(report.ranks)
    m = c.length

    def assemble(gamma):
        minors = _minor_chain(c, r, gamma)
        result = _evaluate_minors(c, minors)
        if result is None:
            return None
        sign, log_abs, min_det, min_sv = result
        abs_tau = math.exp(log_abs)
        return TorsionResult(
            tau=sign * abs_tau, abs_tau=abs_tau,
            choices=tuple(tuple(g) for g in gamma),
            min_abs_det=min_det, min_singular_value=min_sv,
            strategy=strategy)

    if strategy == "greedy":
        gamma = [None] * (m + 1)
        gamma[m] = []
        for s in range(m - 1, -1, -1):
            rows = [i for i in range(c.dims[s + 1]) if i not in set(gamma[s + 1])]
            gamma[s] = _pivot_columns(c.boundaries[s][rows, :], r[s])
        result = assemble(gamma)
        if result is None:
            raise SingularMinor(
                "greedy subset choice produced a singular minor "
                "(rank/tolerance inconsistency)")
        return result

    if strategy == "seeded-random":
        rng = np.random.default_rng(seed)
        for _ in range(max_tries):
            gamma = [None] * (m + 1)
            gamma[m] = []
            ok = True
            for s in range(m - 1, -1, -1):
                gamma[s] = sorted(
                    rng.choice(c.dims[s], size=r[s], replace=False).tolist()
                ) if r[s] else []
            result = assemble(gamma)
            if result is not None:
                return result
        raise SingularMinor(
            f"no nonsingular subset choice in {max_tries} random draws")

    raise PachnerLabError(f"unknown torsion strategy {strategy!r}")


# ---------------------------------------------------------------------------
# deformation complex
# ---------------------------------------------------------------------------

def motion_complement_basis(tri: Triangulation, dec: Decoration,
                            seed: int = 0) -> np.ndarray:
    """Orthonormal basis of the complement of the rigid motions in R^{3V}.

    Deterministic: QR of the motion generators followed by seeded random
    directions; the first six Q columns span the motions, the rest are the
    complement basis.
    """
    gens = motion_generators(tri, dec)
    n = gens.shape[0]
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(np.hstack([gens, rng.standard_normal((n, n))]))
    diag = np.abs(np.diag(r)[:6])
    if np.min(diag) <= 1e-12 * np.max(diag):
        raise DegenerateConfiguration(
            "rigid motion generators are numerically dependent")
    return q[:, 6:n]


def build_deformation_complex(tri: Triangulation, dec: Decoration,
                              h: float = 1e-4, seed: int = 0,
                              chain_tol: float = 1e-6) -> BasedComplex:
    """The 4-term candidate complex with the deficit-angle Jacobian inside.

    dims are (3V-6, E, E, 3V-6); the chain condition holds up to the
    finite-difference accuracy of A, hence the looser default chain_tol.
    Raises ChainConditionFailed naming the offending composite.
    """
    jac = assemble_jacobian(tri, dec, h)
    lmat = length_differential(tri, dec)
    q = motion_complement_basis(tri, dec, seed)
    lq = lmat @ q
    nfree = q.shape[1]
    dims = (nfree, len(tri.edges), len(tri.edges), nfree)
    try:
        return from_matrices(dims, [lq, jac.a, lq.T], chain_tol=chain_tol)
    except NotAChainComplex as err:
        raise ChainConditionFailed(str(err)) from err


# ---------------------------------------------------------------------------
# move-invariance experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentCell:
    """One (decoration seed, move script) evaluation."""

    abs_tau: float
    vol_product: float   # product of 6|V_t| over tetrahedra
    len_product: float   # product of l_e^2 over edges
    dims: tuple


@dataclass(frozen=True)
class ExperimentReport:
    """Normalization-candidate table |tau| * vol^p * len^q over all cells."""

    seeds: tuple
    scripts: tuple
    fvectors: tuple
    cells: tuple          # cells[i][j] for seed i, script j
    candidates: tuple     # 9 dicts with p, q, values, spreads, stable flag

    def to_obj(self) -> dict:
        return {
            "seeds": list(self.seeds),
            "scripts": [list(s) for s in self.scripts],
            "fvectors": [list(f) for f in self.fvectors],
            "cells": [
                [
                    {
                        "abs_tau": cell.abs_tau,
                        "vol_product": cell.vol_product,
                        "len_product": cell.len_product,
                        "dims": list(cell.dims),
                    }
                    for cell in row
                ]
                for row in self.cells
            ],
            "candidates": [dict(c) for c in self.candidates],
        }

    def format_table(self) -> str:
        header = f"{'p':>3} {'q':>3} {'spread(seeds)':>14} {'spread(scripts)':>16} {'spread(all)':>12}  stable"
        lines = [header, "-" * len(header)]
        for c in self.candidates:
            lines.append(
                f"{c['p']:>3} {c['q']:>3} {max(c['spread_across_seeds']):>14.3e} "
                f"{max(c['spread_across_scripts']):>16.3e} {c['overall_spread']:>12.3e}  "
                f"{'yes' if c['stable'] else 'no'}")
        return "\n".join(lines)


def _relative_spread(values) -> float:
    arr = np.asarray(values, dtype=float)
    mean = float(np.mean(arr))
    if mean == 0.0:
        return math.inf
    return float((np.max(arr) - np.min(arr)) / abs(mean))


def _walk_script(tri: Triangulation, dec: Decoration, script, extend_seed: int):
    """Apply a script while extending the decoration through 1-4 moves."""
    current, coords = tri, dict(dec.coords)
    for step, cmd in enumerate(script):
        before = Decoration(dict(coords))
        current, record = apply_command(current, dict(cmd))
        if record.kind == "1-4":
            ext = decorate_extend(before, record.new_labels[0],
                                  record.consumed[0],
                                  seed=derive_seed(extend_seed, step))
            coords = dict(ext.coords)
        elif record.kind == "4-1":
            gone = set(before.coords) - set(current.vertices)
            for v in gone:
                coords.pop(v)
    return current, Decoration(coords)


def invariance_experiment(tri: Triangulation, decoration_seeds, move_scripts,
                          scale: float = 1.0, h: float = 1e-4,
                          basis_seed: int = 0,
                          vol_floor: float | None = None,
                          stable_spread: float = 1e-4) -> ExperimentReport:
    """Tabulate |tau| of the deformation complex under normalization candidates.

    For every decoration seed and move script the triangulation is rewritten
    with the decoration carried along (new vertices placed inside their
    consumed tetrahedron), |tau| is computed, and the nine candidates
    |tau| * (prod 6|V_t|)^p * (prod l_e^2)^q for p, q in {-1, 0, 1} are
    tabulated with relative spreads across seeds, across scripts, and
    overall.  A candidate is flagged stable when its overall spread is below
    `stable_spread`; this is a recorded finding, not an assertion.
    """
    seeds = tuple(int(s) for s in decoration_seeds)
    scripts = tuple(tuple(dict(c) for c in s) for s in move_scripts)
    if vol_floor is None:
        vol_floor = FD_SAFE_VOL_FLOOR_REL * scale ** 3

    cells = []
    fvectors = None
    for i, seed in enumerate(seeds):
        row = []
        fvs = []
        for j, script in enumerate(scripts):
            try:
                dec0 = decorate_random(tri, seed, scale, vol_floor=vol_floor)
                tri_j, dec_j = _walk_script(tri, dec0, script, derive_seed(seed, j))
                cpx = build_deformation_complex(tri_j, dec_j, h, basis_seed)
                tau = torsion(cpx)
                lengths = lengths_of(tri_j, dec_j)
                vol_product = 1.0
                for t in tri_j.tets:
                    vol_product *= 6.0 * abs(volume_signed(dec_j, t))
                len_product = 1.0
                for l in lengths.values():
                    len_product *= l * l
                row.append(ExperimentCell(
                    abs_tau=tau.abs_tau, vol_product=vol_product,
                    len_product=len_product, dims=cpx.dims))
                fvs.append(f_vector(tri_j).as_tuple())
            except PachnerLabError as err:
                raise PachnerLabError(
                    f"experiment cell (seed index {i}, script index {j}): {err}"
                ) from err
        cells.append(tuple(row))
        fvectors = tuple(fvs)

    candidates = []
    for p in (-1, 0, 1):
        for q in (-1, 0, 1):
            values = [
                [
                    cell.abs_tau * cell.vol_product ** p * cell.len_product ** q
                    for cell in row
                ]
                for row in cells
            ]
            arr = np.asarray(values)
            spread_seeds = [
                _relative_spread(arr[:, j]) for j in range(len(scripts))]
            spread_scripts = [
                _relative_spread(arr[i, :]) for i in range(len(seeds))]
            overall = _relative_spread(arr.ravel())
            candidates.append({
                "p": p,
                "q": q,
                "values": [list(map(float, r)) for r in values],
                "spread_across_seeds": spread_seeds,
                "spread_across_scripts": spread_scripts,
                "overall_spread": overall,
                "stable": bool(overall < stable_spread),
            })

    return ExperimentReport(
        seeds=seeds, scripts=scripts, fvectors=fvectors,
        cells=tuple(cells), candidates=tuple(candidates))
