"""Pure-Python metric kernels for a single tetrahedron.

Everything here works on plain floats so it can serve as the fallback when
the compiled extension is unavailable.  The six lengths of a tetrahedron on
local vertices (0,1,2,3) are always ordered

    (l01, l02, l03, l12, l13, l23)

i.e. vertex pairs in lexicographic order; ``EDGE_ORDER`` below is the
authoritative list.  Dihedral angles are obtained by re-embedding the
tetrahedron from its lengths (edge on the x-axis, one face in the y>0
half-plane) and measuring the angle with atan2, which stays well-conditioned
where acos of a Gram quotient would not.
"""

import math

from pachnerlab.errors import DegenerateFace, NotRealizable

EDGE_ORDER = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# PERMUTE[k] lists local vertices (i, j, a, b) sending edge k to (0, 1).
_PERMUTE = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2),
            (1, 2, 0, 3), (1, 3, 0, 2), (2, 3, 0, 1))

_PAIR_INDEX = {}
for _k, _e in enumerate(EDGE_ORDER):
    _PAIR_INDEX[_e] = _k
    _PAIR_INDEX[(_e[1], _e[0])] = _k


def pair_index(i, j):
    """Index of local edge {i, j} in EDGE_ORDER."""
    return _PAIR_INDEX[(i, j)]


def _permuted_lengths(l, perm):
    i, j, a, b = perm
    return (l[pair_index(i, j)], l[pair_index(i, a)], l[pair_index(i, b)],
            l[pair_index(j, a)], l[pair_index(j, b)], l[pair_index(a, b)])


def embed_tet(l, tol=1e-10):
    """Embed a tetrahedron from its six lengths.

    Returns (x1, x2, y2, x3, y3, z3) with vertex 0 at the origin, vertex 1 at
    (x1,0,0), vertex 2 at (x2,y2,0) with y2 > 0 and vertex 3 at (x3,y3,z3)
    with z3 > 0.  Raises DegenerateFace if face (0,1,2) is flat beyond `tol`
    (relative) and NotRealizable if the lengths admit no 3D embedding.
    """
    l01, l02, l03, l12, l13, l23 = l
    if min(l01, l02, l03, l12, l13, l23) <= 0.0:
        raise NotRealizable(f"non-positive length in {tuple(l)}")
    x1 = l01
    x2 = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01)
    y2sq = l02 * l02 - x2 * x2
    if y2sq <= (tol * l02) ** 2:
        raise DegenerateFace(f"face (0,1,2) flat for lengths {tuple(l)}")
    y2 = math.sqrt(y2sq)
    x3 = (l01 * l01 + l03 * l03 - l13 * l13) / (2.0 * l01)
    y3 = (l02 * l02 + l03 * l03 - l23 * l23 - 2.0 * x2 * x3) / (2.0 * y2)
    z3sq = l03 * l03 - x3 * x3 - y3 * y3
    if z3sq <= (tol * l03) ** 2:
        raise NotRealizable(f"zero-volume embedding for lengths {tuple(l)}")
    return (x1, x2, y2, x3, y3, math.sqrt(z3sq))


def volume_signed(p, q, r, s):
    """Signed volume of tetrahedron (p,q,r,s): det[q-p, r-p, s-p] / 6."""
    ax, ay, az = q[0] - p[0], q[1] - p[1], q[2] - p[2]
    bx, by, bz = r[0] - p[0], r[1] - p[1], r[2] - p[2]
    cx, cy, cz = s[0] - p[0], s[1] - p[1], s[2] - p[2]
    return (ax * (by * cz - bz * cy)
            - ay * (bx * cz - bz * cx)
            + az * (bx * cy - by * cx)) / 6.0


def cm_determinant(l):
    """Cayley-Menger determinant of six lengths; equals 288 V^2."""
    l01, l02, l03, l12, l13, l23 = l
    d01, d02, d03 = l01 * l01, l02 * l02, l03 * l03
    d12, d13, d23 = l12 * l12, l13 * l13, l23 * l23
    m = [
        [0.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, d01, d02, d03],
        [1.0, d01, 0.0, d12, d13],
        [1.0, d02, d12, 0.0, d23],
        [1.0, d03, d13, d23, 0.0],
    ]
    return _det5(m)


def _det5(m):
    """Determinant of a 5x5 matrix by partially pivoted elimination."""
    det = 1.0
    for col in range(5):
        piv = max(range(col, 5), key=lambda r: abs(m[r][col]))
        if m[piv][col] == 0.0:
            return 0.0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1.0 / m[col][col]
        for r in range(col + 1, 5):
            f = m[r][col] * inv
            if f != 0.0:
                for c in range(col, 5):
                    m[r][c] -= f * m[col][c]
    return det


def volume_from_lengths(l, tol=1e-10):
    """Non-negative volume with 288 V^2 = Cayley-Menger determinant.

    Raises NotRealizable when the determinant is negative beyond `tol`
    relative to the length scale; clips tiny negative values to zero.
    """
    cm = cm_determinant(l)
    scale = sum(x * x for x in l) / 6.0
    if cm <= -tol * scale ** 3:
        raise NotRealizable(
            f"Cayley-Menger determinant {cm:g} < 0 for lengths {tuple(l)}")
    if cm < 0.0:
        return 0.0
    return math.sqrt(cm / 288.0)


def dihedral_at_edge(l, k, tol=1e-10):
    """Interior dihedral angle at local edge k, in (0, pi).

    Re-embeds the tetrahedron with edge k on the x-axis and the face toward
    the first complementary vertex in the y>0 half-plane; the angle is then
    atan2(z3, y3) of the remaining vertex.
    """
    lp = _permuted_lengths(l, _PERMUTE[k])
    _, _, _, _, y3, z3 = embed_tet(lp, tol)
    return math.atan2(z3, y3)


def dihedral_all(l, tol=1e-10):
    """All six dihedral angles, indexed like EDGE_ORDER.

    Embeds once and measures each angle by projecting the two opposite
    vertices onto the plane orthogonal to the edge.
    """
    x1, x2, y2, x3, y3, z3 = embed_tet(l, tol)
    pts = ((0.0, 0.0, 0.0), (x1, 0.0, 0.0), (x2, y2, 0.0), (x3, y3, z3))
    out = []
    for k in range(6):
        i, j, a, b = _PERMUTE[k]
        pi, pj, pa, pb = pts[i], pts[j], pts[a], pts[b]
        ux, uy, uz = pj[0] - pi[0], pj[1] - pi[1], pj[2] - pi[2]
        un = math.sqrt(ux * ux + uy * uy + uz * uz)
        ux, uy, uz = ux / un, uy / un, uz / un
        ax, ay, az = pa[0] - pi[0], pa[1] - pi[1], pa[2] - pi[2]
        bx, by, bz = pb[0] - pi[0], pb[1] - pi[1], pb[2] - pi[2]
        da = ax * ux + ay * uy + az * uz
        db = bx * ux + by * uy + bz * uz
        ax, ay, az = ax - da * ux, ay - da * uy, az - da * uz
        bx, by, bz = bx - db * ux, by - db * uy, bz - db * uz
        cx = ay * bz - az * by
        cy = az * bx - ax * bz
        cz = ax * by - ay * bx
        cross = math.sqrt(cx * cx + cy * cy + cz * cz)
        dot = ax * bx + ay * by + az * bz
        out.append(math.atan2(cross, dot))
    return tuple(out)
