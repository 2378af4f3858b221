# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled metric kernels for a single tetrahedron.

Mirrors ``_pykernels`` exactly: same length ordering (l01, l02, l03, l12,
l13, l23), same embedding construction, same error types.  The per-call cost
matters because finite-difference Jacobian assembly evaluates these kernels
tens of thousands of times per verification run.
"""

from libc.math cimport sqrt, atan2, fabs

from pachnerlab.errors import DegenerateFace, NotRealizable

EDGE_ORDER = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

cdef int[6][4] _PERM
_PERM[0][:] = [0, 1, 2, 3]
_PERM[1][:] = [0, 2, 1, 3]
_PERM[2][:] = [0, 3, 1, 2]
_PERM[3][:] = [1, 2, 0, 3]
_PERM[4][:] = [1, 3, 0, 2]
_PERM[5][:] = [2, 3, 0, 1]

# _PIDX[i][j] = index of edge {i, j} in EDGE_ORDER.
cdef int[4][4] _PIDX
_PIDX[0][:] = [-1, 0, 1, 2]
_PIDX[1][:] = [0, -1, 3, 4]
_PIDX[2][:] = [1, 3, -1, 5]
_PIDX[3][:] = [2, 4, 5, -1]


def pair_index(int i, int j):
    """Index of local edge {i, j} in EDGE_ORDER."""
    return _PIDX[i][j]


cdef int _embed(double* l, double tol, double* out) except -1:
    # out = (x1, x2, y2, x3, y3, z3); raises on degeneracy.
    cdef double l01 = l[0], l02 = l[1], l03 = l[2]
    cdef double l12 = l[3], l13 = l[4], l23 = l[5]
    cdef double x1, x2, y2sq, y2, x3, y3, z3sq
    cdef int i
    for i in range(6):
        if l[i] <= 0.0:
            raise NotRealizable("non-positive length %r" % ((l[0], l[1], l[2], l[3], l[4], l[5]),))
    x1 = l01
    x2 = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01)
    y2sq = l02 * l02 - x2 * x2
    if y2sq <= (tol * l02) * (tol * l02):
        raise DegenerateFace("face (0,1,2) flat for lengths %r" % ((l[0], l[1], l[2], l[3], l[4], l[5]),))
    y2 = sqrt(y2sq)
    x3 = (l01 * l01 + l03 * l03 - l13 * l13) / (2.0 * l01)
    y3 = (l02 * l02 + l03 * l03 - l23 * l23 - 2.0 * x2 * x3) / (2.0 * y2)
    z3sq = l03 * l03 - x3 * x3 - y3 * y3
    if z3sq <= (tol * l03) * (tol * l03):
        raise NotRealizable("zero-volume embedding for lengths %r" % ((l[0], l[1], l[2], l[3], l[4], l[5]),))
    out[0] = x1
    out[1] = x2
    out[2] = y2
    out[3] = x3
    out[4] = y3
    out[5] = sqrt(z3sq)
    return 0


cdef inline void _load6(object l, double* buf):
    cdef int i
    for i in range(6):
        buf[i] = l[i]


def embed_tet(l, double tol=1e-10):
    """Embed a tetrahedron from its six lengths; see _pykernels.embed_tet."""
    cdef double buf[6]
    cdef double out[6]
    _load6(l, buf)
    _embed(buf, tol, out)
    return (out[0], out[1], out[2], out[3], out[4], out[5])


def volume_signed(p, q, r, s):
    """Signed volume of tetrahedron (p,q,r,s): det[q-p, r-p, s-p] / 6."""
    cdef double px = p[0], py = p[1], pz = p[2]
    cdef double ax = q[0] - px, ay = q[1] - py, az = q[2] - pz
    cdef double bx = r[0] - px, by = r[1] - py, bz = r[2] - pz
    cdef double cx = s[0] - px, cy = s[1] - py, cz = s[2] - pz
    return (ax * (by * cz - bz * cy)
            - ay * (bx * cz - bz * cx)
            + az * (bx * cy - by * cx)) / 6.0


cdef double _det5(double[5][5] m):
    cdef double det = 1.0, f, tmp, best
    cdef int col, r, c, piv
    for col in range(5):
        piv = col
        best = fabs(m[col][col])
        for r in range(col + 1, 5):
            if fabs(m[r][col]) > best:
                best = fabs(m[r][col])
                piv = r
        if m[piv][col] == 0.0:
            return 0.0
        if piv != col:
            for c in range(5):
                tmp = m[col][c]
                m[col][c] = m[piv][c]
                m[piv][c] = tmp
            det = -det
        det *= m[col][col]
        f = 1.0 / m[col][col]
        for r in range(col + 1, 5):
            if m[r][col] != 0.0:
                tmp = m[r][col] * f
                for c in range(col, 5):
                    m[r][c] -= tmp * m[col][c]
    return det


def cm_determinant(l):
    """Cayley-Menger determinant of six lengths; equals 288 V^2."""
    cdef double buf[6]
    cdef double[5][5] m
    _load6(l, buf)
    cdef double d01 = buf[0] * buf[0], d02 = buf[1] * buf[1], d03 = buf[2] * buf[2]
    cdef double d12 = buf[3] * buf[3], d13 = buf[4] * buf[4], d23 = buf[5] * buf[5]
    m[0][:] = [0.0, 1.0, 1.0, 1.0, 1.0]
    m[1][:] = [1.0, 0.0, d01, d02, d03]
    m[2][:] = [1.0, d01, 0.0, d12, d13]
    m[3][:] = [1.0, d02, d12, 0.0, d23]
    m[4][:] = [1.0, d03, d13, d23, 0.0]
    return _det5(m)


def volume_from_lengths(l, double tol=1e-10):
    """Non-negative volume with 288 V^2 = Cayley-Menger determinant."""
    cdef double cm = cm_determinant(l)
    cdef double buf[6]
    _load6(l, buf)
    cdef double scale = (buf[0] * buf[0] + buf[1] * buf[1] + buf[2] * buf[2]
                         + buf[3] * buf[3] + buf[4] * buf[4] + buf[5] * buf[5]) / 6.0
    if cm <= -tol * scale * scale * scale:
        raise NotRealizable("Cayley-Menger determinant %g < 0 for lengths %r"
                            % (cm, (buf[0], buf[1], buf[2], buf[3], buf[4], buf[5])))
    if cm < 0.0:
        return 0.0
    return sqrt(cm / 288.0)


def dihedral_at_edge(l, int k, double tol=1e-10):
    """Interior dihedral angle at local edge k, in (0, pi)."""
    cdef double buf[6]
    cdef double lp[6]
    cdef double out[6]
    cdef int i = _PERM[k][0], j = _PERM[k][1], a = _PERM[k][2], b = _PERM[k][3]
    _load6(l, buf)
    lp[0] = buf[_PIDX[i][j]]
    lp[1] = buf[_PIDX[i][a]]
    lp[2] = buf[_PIDX[i][b]]
    lp[3] = buf[_PIDX[j][a]]
    lp[4] = buf[_PIDX[j][b]]
    lp[5] = buf[_PIDX[a][b]]
    _embed(lp, tol, out)
    return atan2(out[5], out[4])


def dihedral_all(l, double tol=1e-10):
    """All six dihedral angles, indexed like EDGE_ORDER."""
    cdef double buf[6]
    cdef double e[6]
    cdef double[4][3] pts
    cdef double ux, uy, uz, un, ax, ay, az, bx, by, bz, da, db
    cdef double cx, cy, cz, cross, dot
    cdef double theta[6]
    cdef int k, i, j, a, b
    _load6(l, buf)
    _embed(buf, tol, e)
    pts[0][:] = [0.0, 0.0, 0.0]
    pts[1][:] = [e[0], 0.0, 0.0]
    pts[2][:] = [e[1], e[2], 0.0]
    pts[3][:] = [e[3], e[4], e[5]]
    for k in range(6):
        i = _PERM[k][0]
        j = _PERM[k][1]
        a = _PERM[k][2]
        b = _PERM[k][3]
        ux = pts[j][0] - pts[i][0]
        uy = pts[j][1] - pts[i][1]
        uz = pts[j][2] - pts[i][2]
        un = sqrt(ux * ux + uy * uy + uz * uz)
        ux /= un
        uy /= un
        uz /= un
        ax = pts[a][0] - pts[i][0]
        ay = pts[a][1] - pts[i][1]
        az = pts[a][2] - pts[i][2]
        bx = pts[b][0] - pts[i][0]
        by = pts[b][1] - pts[i][1]
        bz = pts[b][2] - pts[i][2]
        da = ax * ux + ay * uy + az * uz
        db = bx * ux + by * uy + bz * uz
        ax -= da * ux
        ay -= da * uy
        az -= da * uz
        bx -= db * ux
        by -= db * uy
        bz -= db * uz
        cx = ay * bz - az * by
        cy = az * bx - ax * bz
        cz = ax * by - ay * bx
        cross = sqrt(cx * cx + cy * cy + cz * cz)
        dot = ax * bx + ay * by + az * bz
        theta[k] = atan2(cross, dot)
    return (theta[0], theta[1], theta[2], theta[3], theta[4], theta[5])
