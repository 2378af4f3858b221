"""Vertex-labeled triangulations of 3-manifolds.

A triangulation is a list of oriented tetrahedra, each a 4-tuple of vertex
labels; simplices are identified by their vertex sets, so no multi-edges or
repeated facets.  The tuple order of a tetrahedron carries its orientation
(a tuple and its even permutations name the same oriented tetrahedron).
Build-time validation enforces:

  * four distinct vertices per tetrahedron,
  * no two tetrahedra on the same vertex set,
  * every triangle in at most two tetrahedra,
  * opposite induced orientations on every triangle shared by two tetrahedra.

Derived edge and triangle lists are sorted lexicographically so matrix bases
downstream are reproducible.  Values are immutable after construction.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .errors import (
    DegenerateTet,
    DuplicateTet,
    EdgeNotFound,
    InconsistentOrientation,
    NonManifoldTriangle,
    StarNotCyclic,
)

Tet = tuple[str, str, str, str]
Edge = tuple[str, str]
Triangle = tuple[str, str, str]


def permutation_parity(seq, target):
    """+1 / -1 parity of the permutation taking seq to target; None if not a permutation."""
    seq = list(seq)
    if sorted(seq) != sorted(target):
        return None
    perm = [seq.index(x) for x in target]
    parity = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def oriented_faces(tet: Tet):
    """The four boundary triangles of an oriented tetrahedron.

    Face i omits vertex i and carries sign (-1)^i; returned as oriented
    triples with the sign folded in by swapping two vertices where needed.
    """
    p, q, r, s = tet
    return ((q, r, s), (p, s, r), (p, q, s), (p, r, q))


def _same_cyclic_class(tri_a: Triangle, tri_b: Triangle) -> bool:
    """True if two oriented triangles are equal up to cyclic rotation."""
    a, b, c = tri_a
    return tri_b in ((a, b, c), (b, c, a), (c, a, b))


@dataclass(frozen=True)
class FVector:
    """Counts of vertices, edges, triangles, tetrahedra."""

    n0: int
    n1: int
    n2: int
    n3: int

    def as_tuple(self):
        return (self.n0, self.n1, self.n2, self.n3)

    @property
    def euler(self):
        return self.n0 - self.n1 + self.n2 - self.n3


@dataclass(frozen=True)
class Triangulation:
    """Immutable vertex-labeled triangulation with cached incidence."""

    vertices: tuple[str, ...]
    tets: tuple[Tet, ...]
    edges: tuple[Edge, ...] = field(repr=False)
    triangles: tuple[Triangle, ...] = field(repr=False)
    _edge_tets: dict = field(repr=False, compare=False)
    _tri_tets: dict = field(repr=False, compare=False)

    @property
    def edge_index(self):
        return {e: i for i, e in enumerate(self.edges)}

    def has_edge(self, u: str, v: str) -> bool:
        return tuple(sorted((u, v))) in self._edge_tets

    def has_tet_set(self, labels) -> bool:
        want = frozenset(labels)
        return any(frozenset(t) == want for t in self.tets)

    def tets_of_edge(self, u: str, v: str):
        """Indices of tetrahedra containing edge {u, v} (unordered)."""
        key = tuple(sorted((u, v)))
        if key not in self._edge_tets:
            raise EdgeNotFound(f"edge {key} not in triangulation")
        return self._edge_tets[key]

    def tets_of_vertex(self, v: str):
        return tuple(i for i, t in enumerate(self.tets) if v in t)


def build(tets, vertices=None) -> Triangulation:
    """Validate a tetrahedron list and derive incidence caches.

    `vertices` fixes the stored vertex order (used by JSON round-trips); by
    default labels are sorted.  Raises DegenerateTet, DuplicateTet,
    NonManifoldTriangle or InconsistentOrientation.
    """
    tet_tuples = []
    for t in tets:
        tt = tuple(str(v) for v in t)
        if len(tt) != 4:
            raise DegenerateTet(f"tetrahedron {tt} does not have 4 vertices")
        if len(set(tt)) != 4:
            raise DegenerateTet(f"repeated vertex in tetrahedron {tt}")
        tet_tuples.append(tt)

    seen_sets = {}
    for i, tt in enumerate(tet_tuples):
        key = frozenset(tt)
        if key in seen_sets:
            raise DuplicateTet(
                f"tetrahedra {seen_sets[key]} and {i} share vertex set {sorted(key)}")
        seen_sets[key] = i

    labels = set()
    for tt in tet_tuples:
        labels.update(tt)
    if vertices is None:
        vertex_order = tuple(sorted(labels))
    else:
        vertex_order = tuple(str(v) for v in vertices)
        if set(vertex_order) != labels or len(vertex_order) != len(labels):
            raise DegenerateTet(
                "vertex list does not match the labels used by the tetrahedra")

    edge_tets: dict[Edge, list[int]] = {}
    tri_tets: dict[Triangle, list[int]] = {}
    for i, tt in enumerate(tet_tuples):
        for pair in combinations(sorted(tt), 2):
            edge_tets.setdefault(pair, []).append(i)
        for tri in combinations(sorted(tt), 3):
            tri_tets.setdefault(tri, []).append(i)

    for tri, owners in tri_tets.items():
        if len(owners) > 2:
            raise NonManifoldTriangle(
                f"triangle {tri} lies in {len(owners)} tetrahedra {owners}")

    # Shared triangles must be induced with opposite orientations.
    for tri, owners in tri_tets.items():
        if len(owners) != 2:
            continue
        induced = []
        for i in owners:
            for face in oriented_faces(tet_tuples[i]):
                if frozenset(face) == frozenset(tri):
                    induced.append(face)
        if _same_cyclic_class(induced[0], induced[1]):
            raise InconsistentOrientation(
                f"triangle {tri} induced as {induced[0]} by both tetrahedra "
                f"{owners[0]} and {owners[1]}")

    return Triangulation(
        vertices=vertex_order,
        tets=tuple(tet_tuples),
        edges=tuple(sorted(edge_tets)),
        triangles=tuple(sorted(tri_tets)),
        _edge_tets={e: tuple(v) for e, v in edge_tets.items()},
        _tri_tets={t: tuple(v) for t, v in tri_tets.items()},
    )


def f_vector(tri: Triangulation) -> FVector:
    """Exact simplex counts."""
    return FVector(len(tri.vertices), len(tri.edges), len(tri.triangles),
                   len(tri.tets))


def is_closed(tri: Triangulation) -> bool:
    """True iff every triangle lies in exactly two tetrahedra."""
    return all(len(v) == 2 for v in tri._tri_tets.values())


def edge_star(tri: Triangulation, e) -> tuple[Tet, ...]:
    """Tetrahedra containing edge e, chained around the edge.

    Consecutive tetrahedra share a triangle containing e.  For an interior
    edge of a closed triangulation the result is a cycle; for a boundary
    edge it is a fan.  Raises EdgeNotFound, or StarNotCyclic when the star
    does not chain into a single fan or cycle (non-manifold edge link).
    """
    u, v = sorted((str(e[0]), str(e[1])))
    owners = tri.tets_of_edge(u, v)
    tets = [tri.tets[i] for i in owners]
    if len(tets) == 1:
        return (tets[0],)

    # Adjacency between star tets: shared triangle containing e, i.e. a
    # shared link vertex.  Each link vertex names a triangle {u, v, w} which
    # lies in at most 2 tetrahedra, so degrees are at most 2.
    link = [tuple(x for x in t if x not in (u, v)) for t in tets]
    wmap: dict[str, list[int]] = {}
    for i, (a, b) in enumerate(link):
        wmap.setdefault(a, []).append(i)
        wmap.setdefault(b, []).append(i)

    adj: dict[int, list[int]] = {i: [] for i in range(len(tets))}
    for w, members in wmap.items():
        if len(members) == 2:
            a, b = members
            adj[a].append(b)
            adj[b].append(a)

    ends = [i for i in adj if len(adj[i]) < 2]
    start = min(ends) if ends else 0
    order = [start]
    prev = None
    while True:
        nxt = [j for j in adj[order[-1]] if j != prev]
        if not nxt:
            break
        prev = order[-1]
        order.append(nxt[0])
        if order[-1] == start:
            order.pop()
            break
    if len(order) != len(tets):
        raise StarNotCyclic(
            f"star of edge ({u},{v}) does not chain into a single fan or cycle")
    return tuple(tets[i] for i in order)


def edge_valence(tri: Triangulation, e) -> int:
    return len(tri.tets_of_edge(*sorted((str(e[0]), str(e[1])))))


def seed_boundary_4simplex() -> Triangulation:
    """Boundary of the 4-simplex on A..E: 5 tetrahedra, the minimal closed S^3.

    Facet i omits the i-th vertex and carries sign (-1)^i; odd facets get a
    transposition so every stored tuple is positively oriented.
    """
    verts = ("A", "B", "C", "D", "E")
    tets = []
    for i in range(5):
        face = [verts[j] for j in range(5) if j != i]
        if i % 2 == 1:
            face[0], face[1] = face[1], face[0]
        tets.append(tuple(face))
    return build(tets)


def _vertex_signature(tri: Triangulation, v: str):
    tet_count = sum(1 for t in tri.tets if v in t)
    valences = sorted(
        len(tri._edge_tets[e]) for e in tri.edges if v in e)
    return (tet_count, tuple(valences))


def isomorphic(t1: Triangulation, t2: Triangulation):
    """Vertex bijection mapping tets of t1 onto tets of t2 as vertex sets.

    Backtracking over label assignments with valence-profile pruning;
    intended for the desk scale (up to ~20 vertices).  Returns the mapping
    dict, or None.
    """
    if f_vector(t1).as_tuple() != f_vector(t2).as_tuple():
        return None

    sig1 = {v: _vertex_signature(t1, v) for v in t1.vertices}
    sig2 = {v: _vertex_signature(t2, v) for v in t2.vertices}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None

    candidates = {
        v: tuple(w for w in t2.vertices if sig2[w] == sig1[v])
        for v in t1.vertices
    }
    if any(not c for c in candidates.values()):
        return None

    t2_tet_sets = {frozenset(t) for t in t2.tets}
    order = sorted(t1.vertices, key=lambda v: len(candidates[v]))

    # Tets of t1 become checkable once their last vertex is assigned.
    position = {v: i for i, v in enumerate(order)}
    ready_at: dict[int, list[frozenset]] = {i: [] for i in range(len(order))}
    for t in t1.tets:
        ready_at[max(position[v] for v in t)].append(frozenset(t))

    assignment: dict[str, str] = {}
    used: set[str] = set()

    def extend(depth: int):
        if depth == len(order):
            return True
        v = order[depth]
        for w in candidates[v]:
            if w in used:
                continue
            assignment[v] = w
            used.add(w)
            ok = all(
                frozenset(assignment[x] for x in t) in t2_tet_sets
                for t in ready_at[depth]
            )
            if ok and extend(depth + 1):
                return True
            used.discard(w)
            del assignment[v]
        return False

    if extend(0):
        return dict(assignment)
    return None
