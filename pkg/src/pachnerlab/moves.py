"""The four 3D Pachner moves as validated rewrites on Triangulation values.

A 2-3 move replaces two tetrahedra ABCD and EABC sharing triangle ABC by the
three tetrahedra ABED, BCED, CAED around the new edge DE; a 1-4 move splits
tetrahedron ABCD at a new interior vertex E into ABCE, ABED, AECD, EBCD.
The inverse moves undo these patterns.  Produced tuples use exactly those
vertex orders, which keeps orientations consistent: a move applied to a
consistently oriented triangulation yields one, and the boundary facet set
is untouched.

In the vertex-labeled regime a 2-3 move whose apex edge already exists is
rejected (no multi-edges), and inverse moves refuse to recreate a
tetrahedron that is already present.
"""

from dataclasses import dataclass
from itertools import permutations

from .errors import (
    EdgeAlreadyPresent,
    LabelInUse,
    MoveScriptError,
    PatternMismatch,
    SiteStale,
    TetAlreadyPresent,
    TetNotFound,
    WrongLinkValence,
    WrongValence,
)
from .simplicial import (
    Tet,
    Triangulation,
    build,
    edge_star,
    permutation_parity,
)

F_DELTAS = {
    "2-3": (0, 1, 2, 1),
    "3-2": (0, -1, -2, -1),
    "1-4": (1, 4, 6, 3),
    "4-1": (-1, -4, -6, -3),
}


@dataclass(frozen=True)
class MoveSite23:
    """A 2-3 move site: two tetrahedra sharing a triangle, apex edge absent.

    `shared` is (A, B, C) read off tet1 so that tet1 is an even permutation
    of (A, B, C, apex_d); the produced tetrahedra then follow the fixed
    naming (A,B,E,D), (B,C,E,D), (C,A,E,D).
    """

    tet1: Tet
    tet2: Tet
    shared: tuple[str, str, str]
    apex_d: str
    apex_e: str


@dataclass(frozen=True)
class MoveRecord:
    """One applied move: enough to replay the rewrite verbatim."""

    kind: str
    consumed: tuple[Tet, ...]
    produced: tuple[Tet, ...]
    new_labels: tuple[str, ...]


MoveLog = tuple[MoveRecord, ...]


def _even_form_with_last(tet: Tet, last: str):
    """(a, b, c) with (a, b, c, last) an even permutation of tet.

    The cyclic rotation is normalized to put the lexicographically smallest
    label first, so the answer is canonical.
    """
    rest = [v for v in tet if v != last]
    if permutation_parity(tet, (*rest, last)) == -1:
        rest[0], rest[1] = rest[1], rest[0]
    k = rest.index(min(rest))
    return tuple(rest[k:] + rest[:k])


def canonical_oriented(tet: Tet) -> Tet:
    """Lexicographically smallest even permutation representing the oriented tet."""
    return min(p for p in permutations(tet) if permutation_parity(tet, p) == 1)


def _rebuild(tri: Triangulation, consumed, produced) -> Triangulation:
    removed = set(consumed)
    tets = [t for t in tri.tets if t not in removed] + list(produced)
    labels = {v for t in tets for v in t}
    vertices = [v for v in tri.vertices if v in labels]
    vertices += sorted(labels - set(vertices))
    return build(tets, vertices=vertices)


# ---------------------------------------------------------------------------
# 2 -> 3
# ---------------------------------------------------------------------------

def find_sites_23(tri: Triangulation) -> list[MoveSite23]:
    """All triangle-sharing tet pairs whose apex edge is absent, in
    (tet-index, tet-index) order."""
    sites = []
    pairs = sorted(tuple(v) for v in tri._tri_tets.values() if len(v) == 2)
    seen = set()
    for i, j in pairs:
        if (i, j) in seen:
            continue
        seen.add((i, j))
        t1, t2 = tri.tets[i], tri.tets[j]
        shared_set = set(t1) & set(t2)
        if len(shared_set) != 3:
            continue
        apex_d = next(v for v in t1 if v not in shared_set)
        apex_e = next(v for v in t2 if v not in shared_set)
        if tri.has_edge(apex_d, apex_e):
            continue
        shared = _even_form_with_last(t1, apex_d)
        sites.append(MoveSite23(t1, t2, shared, apex_d, apex_e))
    return sites


def apply_23(tri: Triangulation, site: MoveSite23) -> Triangulation:
    """Replace ABCD and EABC by ABED, BCED, CAED around the new edge DE."""
    if site.tet1 not in tri.tets or site.tet2 not in tri.tets:
        raise SiteStale(f"site tetrahedra {site.tet1}/{site.tet2} not in triangulation")
    a, b, c = site.shared
    d, e = site.apex_d, site.apex_e
    if set(site.tet1) != {a, b, c, d} or set(site.tet2) != {a, b, c, e}:
        raise SiteStale(f"site fields inconsistent: {site}")
    if tri.has_edge(d, e):
        raise EdgeAlreadyPresent(f"apex edge ({d},{e}) already present")
    if permutation_parity(site.tet2, (e, a, b, c)) != 1:
        # cannot happen for sites found in an orientation-validated triangulation
        raise PatternMismatch(
            f"tet {site.tet2} is not an even permutation of ({e},{a},{b},{c})")
    produced = ((a, b, e, d), (b, c, e, d), (c, a, e, d))
    return _rebuild(tri, (site.tet1, site.tet2), produced)


# ---------------------------------------------------------------------------
# 3 -> 2
# ---------------------------------------------------------------------------

def apply_32(tri: Triangulation, e) -> Triangulation:
    """Collapse the 3-tet star of a valence-3 edge DE back to ABCD and EABC."""
    u, v = str(e[0]), str(e[1])
    star = edge_star(tri, (u, v))
    if len(star) != 3:
        raise WrongValence(f"edge ({u},{v}) has valence {len(star)}, need 3")

    link = [tuple(x for x in t if x not in (u, v)) for t in star]
    # edge_star chains the tets, so consecutive ones share a link vertex
    common01 = set(link[0]) & set(link[1])
    if len(common01) != 1 or len(set(link[0]) | set(link[1]) | set(link[2])) != 3:
        raise PatternMismatch(f"star of ({u},{v}) is not a 3-cycle of link vertices")

    bb = common01.pop()
    aa = next(x for x in link[0] if x != bb)
    cc = next(x for x in link[1] if x != bb)

    assignment = None
    for a, b, c in ((aa, bb, cc), (cc, bb, aa)):
        for d, ee in ((u, v), (v, u)):
            want = {
                frozenset((a, b, ee, d)): (a, b, ee, d),
                frozenset((b, c, ee, d)): (b, c, ee, d),
                frozenset((c, a, ee, d)): (c, a, ee, d),
            }
            ok = all(
                frozenset(t) in want
                and permutation_parity(t, want[frozenset(t)]) == 1
                for t in star
            )
            if ok:
                assignment = (a, b, c, d, ee)
                break
        if assignment:
            break
    if assignment is None:
        raise PatternMismatch(
            f"star of ({u},{v}) does not match the 2-3 production pattern")

    a, b, c, d, ee = assignment
    for replacement in ((a, b, c, d), (ee, a, b, c)):
        if tri.has_tet_set(replacement):
            raise TetAlreadyPresent(
                f"replacement tetrahedron {sorted(replacement)} already present")
    produced = (canonical_oriented((a, b, c, d)), canonical_oriented((ee, a, b, c)))
    return _rebuild(tri, star, produced)


# ---------------------------------------------------------------------------
# 1 -> 4
# ---------------------------------------------------------------------------

def _resolve_tet(tri: Triangulation, t):
    if isinstance(t, int):
        if not 0 <= t < len(tri.tets):
            raise TetNotFound(f"tet index {t} out of range")
        return tri.tets[t]
    key = frozenset(str(v) for v in t)
    for stored in tri.tets:
        if frozenset(stored) == key:
            return stored
    raise TetNotFound(f"tetrahedron {sorted(key)} not in triangulation")


def apply_14(tri: Triangulation, t, new_label: str) -> Triangulation:
    """Split tetrahedron ABCD at a new interior vertex E into ABCE, ABED, AECD, EBCD."""
    new_label = str(new_label)
    stored = _resolve_tet(tri, t)
    if new_label in tri.vertices:
        raise LabelInUse(f"label {new_label!r} already used")
    a, b, c, d = stored
    e = new_label
    produced = ((a, b, c, e), (a, b, e, d), (a, e, c, d), (e, b, c, d))
    return _rebuild(tri, (stored,), produced)


# ---------------------------------------------------------------------------
# 4 -> 1
# ---------------------------------------------------------------------------

def apply_41(tri: Triangulation, v: str) -> Triangulation:
    """Remove a vertex whose link is the boundary of a tetrahedron."""
    v = str(v)
    star_idx = tri.tets_of_vertex(v)
    if len(star_idx) != 4:
        raise WrongLinkValence(
            f"vertex {v!r} lies in {len(star_idx)} tetrahedra, need 4")
    star = [tri.tets[i] for i in star_idx]
    link_labels = {x for t in star for x in t} - {v}
    link_tris = {frozenset(x for x in t if x != v) for t in star}
    if len(link_labels) != 4 or len(link_tris) != 4:
        raise PatternMismatch(
            f"link of {v!r} is not the boundary of a tetrahedron")

    t0 = star[0]
    a, b, c = _even_form_with_last(t0, v)
    d = next(x for x in link_labels if x not in (a, b, c))
    want = {
        frozenset((a, b, c, v)): (a, b, c, v),
        frozenset((a, b, v, d)): (a, b, v, d),
        frozenset((a, v, c, d)): (a, v, c, d),
        frozenset((v, b, c, d)): (v, b, c, d),
    }
    for t in star:
        key = frozenset(t)
        if key not in want or permutation_parity(t, want[key]) != 1:
            raise PatternMismatch(
                f"star of {v!r} does not match the 1-4 production pattern")
    if tri.has_tet_set((a, b, c, d)):
        raise TetAlreadyPresent(
            f"replacement tetrahedron {sorted((a, b, c, d))} already present")
    return _rebuild(tri, star, (canonical_oriented((a, b, c, d)),))


# ---------------------------------------------------------------------------
# scripted sequences
# ---------------------------------------------------------------------------

def apply_command(tri: Triangulation, cmd: dict):
    """Apply one script command; returns the new triangulation and a MoveRecord."""
    kind = cmd.get("move")
    if kind == "2-3":
        sites = find_sites_23(tri)
        idx = int(cmd["site"])
        if not 0 <= idx < len(sites):
            raise SiteStale(f"site index {idx} out of range ({len(sites)} sites)")
        site = sites[idx]
        out = apply_23(tri, site)
        consumed = (site.tet1, site.tet2)
    elif kind == "3-2":
        u, v = cmd["edge"]
        star = edge_star(tri, (u, v))
        out = apply_32(tri, (u, v))
        consumed = tuple(star)
    elif kind == "1-4":
        stored = _resolve_tet(tri, cmd["tet"] if not isinstance(cmd["tet"], list)
                              else tuple(cmd["tet"]))
        out = apply_14(tri, stored, cmd["label"])
        consumed = (stored,)
    elif kind == "4-1":
        v = str(cmd["vertex"])
        consumed = tuple(tri.tets[i] for i in tri.tets_of_vertex(v))
        out = apply_41(tri, v)
    else:
        raise PatternMismatch(f"unknown move kind {kind!r}")

    produced = tuple(t for t in out.tets if t not in set(tri.tets))
    new_labels = tuple(sorted(set(out.vertices) - set(tri.vertices)))
    return out, MoveRecord(kind, consumed, produced, new_labels)


def apply_sequence(tri: Triangulation, script) -> tuple[Triangulation, MoveLog]:
    """Apply a list of move commands; errors carry the failing script index."""
    log = []
    current = tri
    for idx, cmd in enumerate(script):
        try:
            current, record = apply_command(current, dict(cmd))
        except MoveScriptError:
            raise
        except Exception as err:
            raise MoveScriptError(idx, err) from err
        log.append(record)
    return current, tuple(log)


def replay_log(tri: Triangulation, log) -> Triangulation:
    """Re-apply recorded rewrites; reproduces the final triangulation exactly."""
    current = tri
    for record in log:
        for t in record.consumed:
            if t not in current.tets:
                raise SiteStale(f"replay: consumed tetrahedron {t} missing")
        current = _rebuild(current, record.consumed, record.produced)
    return current
