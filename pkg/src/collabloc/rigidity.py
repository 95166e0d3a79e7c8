"""Unique-localizability predicates on grounded network graphs.

Vertices ``0 .. B-1`` are anchors (base stations) and are mutually joined,
which encodes their immovability; vertices ``B .. B+C-1`` are free mobile
devices. Rigidity uses the (2, 3) pebble game; a subset-enumeration Laman
check is provided as an independent oracle for small graphs.
"""

from dataclasses import dataclass
from itertools import combinations
import io

import numpy as np

__all__ = [
    "GroundedGraph",
    "RigidityDomainError",
    "independent_edge_count",
    "is_rigid",
    "is_triconnected_degree",
    "is_three_connected",
    "c2_connectivity_gap",
    "is_redundantly_rigid",
    "network_localizable",
    "device_localizable",
    "device_localizable_ranging",
    "device_localizable_rangediff",
    "two_device_graph",
    "device_localizable_via_graph",
    "laman_rigid_bruteforce",
    "laman_rigid_exhaustive",
    "read_edge_list",
    "write_edge_list",
]


class RigidityDomainError(ValueError):
    pass


def _pair(i, j):
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class GroundedGraph:
    anchor_count: int
    free_count: int
    edges: frozenset

    def __post_init__(self):
        n = self.n
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range")
            if i > j:
                raise ValueError("edges must be stored as (low, high) pairs")
        for e in combinations(range(self.anchor_count), 2):
            if e not in self.edges:
                raise ValueError(f"anchor pair {e} missing")

    @classmethod
    def build(cls, anchor_count: int, free_count: int, edges=()) -> "GroundedGraph":
        """Graph with the given measurement edges plus all anchor pairs.
        Duplicate edges collapse."""
        es = {_pair(int(i), int(j)) for i, j in edges}
        es.update(combinations(range(anchor_count), 2))
        return cls(anchor_count, free_count, frozenset(es))

    @property
    def n(self) -> int:
        return self.anchor_count + self.free_count

    def is_anchor_pair(self, e) -> bool:
        return e[0] < self.anchor_count and e[1] < self.anchor_count

    @property
    def removable_edges(self):
        return sorted(e for e in self.edges if not self.is_anchor_pair(e))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def without(self, e) -> "GroundedGraph":
        if self.is_anchor_pair(e):
            raise ValueError("anchor pairs are structural and cannot be removed")
        return GroundedGraph(self.anchor_count, self.free_count, self.edges - {e})

    def with_edge(self, e) -> "GroundedGraph":
        return GroundedGraph(self.anchor_count, self.free_count, self.edges | {_pair(*e)})


class _PebbleGame:
    """(2, 3) pebble game: each vertex starts with two pebbles; an edge is
    independent iff four pebbles can be gathered on its endpoints."""

    def __init__(self, n):
        self.pebbles = [2] * n
        self.out = [set() for _ in range(n)]

    def _collect(self, root, keep):
        # DFS over directed edges for a free pebble, then reverse the path
        parent = {root: None, keep: None}
        stack = [root]
        while stack:
            a = stack.pop()
            for b in self.out[a]:
                if b in parent:
                    continue
                parent[b] = a
                if self.pebbles[b] > 0:
                    self.pebbles[b] -= 1
                    self.pebbles[root] += 1
                    while parent[b] is not None:
                        p = parent[b]
                        self.out[p].remove(b)
                        self.out[b].add(p)
                        b = p
                    return True
                stack.append(b)
        return False

    def add(self, u, v) -> bool:
        while self.pebbles[u] < 2 and self._collect(u, v):
            pass
        while self.pebbles[v] < 2 and self._collect(v, u):
            pass
        if self.pebbles[u] + self.pebbles[v] < 4:
            return False
        self.pebbles[u] -= 1
        self.out[u].add(v)
        return True


def independent_edge_count(g: GroundedGraph) -> int:
    game = _PebbleGame(g.n)
    return sum(game.add(i, j) for i, j in sorted(g.edges))


def is_rigid(g: GroundedGraph) -> bool:
    """Generic rigidity: the graph contains ``2N - 3`` independent edges."""
    if g.n <= 1:
        return True
    return independent_edge_count(g) == 2 * g.n - 3


def is_triconnected_degree(g: GroundedGraph) -> bool:
    """Degree condition: every vertex has at least three edges."""
    return bool(np.all(g.degrees() >= 3))


def _connected(n, edges, removed):
    keep = [v for v in range(n) if v not in removed]
    if len(keep) <= 1:
        return True
    adj = {v: [] for v in keep}
    for i, j in edges:
        if i in adj and j in adj:
            adj[i].append(j)
            adj[j].append(i)
    seen = {keep[0]}
    stack = [keep[0]]
    while stack:
        for b in adj[stack.pop()]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(keep)


def is_three_connected(g: GroundedGraph) -> bool:
    """3-vertex-connectivity by deleting every vertex pair (small graphs)."""
    if g.n < 4:
        return False
    return all(
        _connected(g.n, g.edges, set(pair))
        for k in range(3)
        for pair in combinations(range(g.n), k)
    )


def c2_connectivity_gap(g: GroundedGraph) -> bool:
    """True for graphs passing the degree condition while failing
    3-vertex-connectivity."""
    return is_triconnected_degree(g) and not is_three_connected(g)


def is_redundantly_rigid(g: GroundedGraph) -> bool:
    """Rigid, and still rigid after deleting any one measurement edge."""
    if not is_rigid(g):
        return False
    return all(is_rigid(g.without(e)) for e in g.removable_edges)


def network_localizable(g: GroundedGraph) -> bool:
    """Rigid, degree >= 3 and redundantly rigid. Requires at least three anchors."""
    if g.anchor_count < 3:
        raise RigidityDomainError("at least three anchors are required")
    return is_rigid(g) and is_triconnected_degree(g) and is_redundantly_rigid(g)


def device_localizable(n_u, n_v, unique_combined, has_collab_link, ell: int):
    """Device ``u`` resolves its position iff it hears ``ell + 1`` BSs, or it
    hears exactly ``ell``, its collaborator hears at least ``ell``, and
    together they hear ``ell + 1`` distinct BSs. Works elementwise on arrays."""
    if np.isscalar(n_u) and np.isscalar(n_v) and np.isscalar(unique_combined):
        if unique_combined > n_u + n_v:
            raise ValueError("unique_combined cannot exceed n_u + n_v")
    n_u = np.asarray(n_u)
    n_v = np.asarray(n_v)
    uc = np.asarray(unique_combined)
    out = (n_u >= ell + 1) | (
        np.asarray(has_collab_link, dtype=bool) & (n_u == ell) & (n_v >= ell) & (uc >= ell + 1)
    )
    return bool(out) if out.ndim == 0 else out


def device_localizable_ranging(n_u, n_v, unique_combined, has_collab_link):
    """Range observations: three BSs alone, or two plus a collaborator with
    two, three distinct in total."""
    return device_localizable(n_u, n_v, unique_combined, has_collab_link, 2)


def device_localizable_rangediff(n_u, n_v, unique_combined, has_collab_link):
    """Range-difference observations: thresholds shift up by one BS."""
    return device_localizable(n_u, n_v, unique_combined, has_collab_link, 3)


def two_device_graph(anchors_u, anchors_v, has_collab_link=True) -> GroundedGraph:
    """Grounded graph of ``u`` and ``v`` with the BSs either one hears.

    BS identifiers may be arbitrary hashables; they are relabelled ``0..B-1``.
    ``u`` is vertex ``B`` and ``v`` is vertex ``B + 1``.
    """
    ids = sorted(set(anchors_u) | set(anchors_v))
    label = {a: i for i, a in enumerate(ids)}
    b = len(ids)
    edges = [(label[a], b) for a in set(anchors_u)]
    edges += [(label[a], b + 1) for a in set(anchors_v)]
    if has_collab_link:
        edges.append((b, b + 1))
    return GroundedGraph.build(b, 2, edges)


def device_localizable_via_graph(anchors_u, anchors_v, has_collab_link=True) -> bool:
    """Localizability of ``u`` by full graph evaluation: ``u`` resolves its
    position when either ``u`` alone with its BSs, or ``u`` and ``v`` with all BSs they
    hear, form a network localizable grounded graph (fewer than three BSs
    never suffice)."""
    au = set(anchors_u)
    if len(au) >= 3:
        g_u = GroundedGraph.build(len(au), 1, [(i, len(au)) for i in range(len(au))])
        if network_localizable(g_u):
            return True
    if not has_collab_link:
        return False
    g = two_device_graph(au, anchors_v, True)
    if g.anchor_count < 3:
        return False
    return network_localizable(g)


# -- oracles -----------------------------------------------------------------

def _masks(g):
    n = g.n
    subsets = np.arange(1 << n)
    size = np.array([bin(s).count("1") for s in subsets])
    cap = 2 * size - 3
    return subsets, size, cap


def laman_rigid_bruteforce(g: GroundedGraph) -> bool:
    """Rigidity by enumerating vertex subsets (Laman counts).

    Edges are added greedily while every vertex subset ``S`` with
    ``|S| >= 2`` spans at most ``2|S| - 3`` kept edges; Laman-sparse sets form
    a matroid, so the greedy set is maximal. Exponential in ``N``; meant for
    ``N <= 10``.
    """
    n = g.n
    if n <= 1:
        return True
    subsets, size, cap = _masks(g)
    count = np.zeros(len(subsets), dtype=int)
    kept = 0
    for i, j in sorted(g.edges):
        em = (1 << i) | (1 << j)
        inside = (subsets & em) == em
        if np.all(count[inside] + 1 <= cap[inside]):
            count[inside] += 1
            kept += 1
    return kept == 2 * n - 3


def laman_rigid_exhaustive(g: GroundedGraph, limit: int = 200_000) -> bool:
    """Literal form of Laman's condition: search every ``2N - 3`` edge subset
    for one in which no vertex subset is over-braced. Only for tiny graphs."""
    from math import comb

    n = g.n
    if n <= 1:
        return True
    need = 2 * n - 3
    edges = sorted(g.edges)
    if len(edges) < need:
        return False
    if comb(len(edges), need) > limit:
        raise ValueError("graph too large for exhaustive enumeration")
    vsubs = [s for k in range(2, n + 1) for s in combinations(range(n), k)]
    for sub in combinations(edges, need):
        ok = True
        for vs in vsubs:
            vset = set(vs)
            if sum(1 for i, j in sub if i in vset and j in vset) > 2 * len(vs) - 3:
                ok = False
                break
        if ok:
            return True
    return False


# -- edge-list I/O -------------------------------------------------------------

def write_edge_list(g: GroundedGraph, fh=None) -> str:
    """Header ``"B C"`` then one ``"i j"`` line per edge (anchor pairs
    included). Returns the text and writes it to ``fh`` when given."""
    lines = [f"{g.anchor_count} {g.free_count}"]
    lines += [f"{i} {j}" for i, j in sorted(g.edges)]
    text = "\n".join(lines) + "\n"
    if fh is not None:
        fh.write(text)
    return text


def read_edge_list(src) -> GroundedGraph:
    """Parse the edge-list format; ``#`` starts a comment. Missing anchor
    pairs are filled in."""
    if isinstance(src, str):
        src = io.StringIO(src)
    rows = []
    for raw in src:
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError("empty edge list")
    if len(rows[0]) != 2:
        raise ValueError("header must be 'B C'")
    b, c = (int(v) for v in rows[0])
    if b < 0 or c < 0:
        raise ValueError("counts must be non-negative")
    edges = []
    for r in rows[1:]:
        if len(r) != 2:
            raise ValueError(f"bad edge line: {' '.join(r)}")
        edges.append((int(r[0]), int(r[1])))
    return GroundedGraph.build(b, c, edges)
