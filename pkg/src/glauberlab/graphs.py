"""Finite undirected graphs with the metric/boundary primitives used everywhere else.

Vertices are dense integers ``0..n-1``.  Graphs are immutable after
construction; adjacency is stored in CSR form with sorted neighbor lists,
so deterministic iteration is always in vertex-id order.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

UNREACHABLE = math.inf


class GraphError(ValueError):
    pass


class Graph:
    """Immutable undirected graph without self-loops or parallel edges.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of (u, v)
        Undirected edges; duplicates and self-loops are rejected.
    kind, params : metadata describing how the graph was built.
    base : Graph, optional
        For distance-2 square graphs, the underlying graph, kept so that
        update rules may query base adjacency.
    """

    __slots__ = ("n", "indptr", "indices", "max_degree", "kind", "params", "base",
                 "_rows")

    def __init__(self, n, edges, kind="edges", params=None, base=None):
        if n < 1:
            raise GraphError(f"need at least one vertex, got n={n}")
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        adj = [[] for _ in range(n)]
        for u, v in sorted(seen):
            adj[u].append(v)
            adj[v].append(u)
        counts = np.array([len(a) for a in adj], dtype=np.int64)
        self.n = n
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.indices = np.array(
            [w for a in adj for w in sorted(a)], dtype=np.int64
        )
        self.max_degree = int(counts.max()) if n else 0
        self.kind = kind
        self.params = dict(params or {})
        self.base = base
        self._rows = None

    def neighbors(self, v):
        """Sorted neighbor ids of ``v`` as an ndarray view."""
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range")
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v):
        return int(self.indptr[v + 1] - self.indptr[v])

    def edge_rows(self):
        """Source vertex of each directed adjacency entry (aligned with indices)."""
        if self._rows is None:
            self._rows = np.repeat(np.arange(self.n, dtype=np.int64),
                                   np.diff(self.indptr))
        return self._rows

    @property
    def edge_count(self):
        return int(self.indices.size // 2)

    def edges(self):
        """Edges as (u, v) with u < v, lexicographically sorted."""
        out = []
        for u in range(self.n):
            for w in self.neighbors(u):
                if u < w:
                    out.append((u, int(w)))
        return out

    def adjacency_lists(self):
        return {v: [int(w) for w in self.neighbors(v)] for v in range(self.n)}

    def __repr__(self):
        return f"Graph(kind={self.kind!r}, n={self.n}, edges={self.edge_count}, max_degree={self.max_degree})"


def _check_positive_int(params, key, minimum=1):
    value = params.get(key)
    if not isinstance(value, (int, np.integer)) or value < minimum:
        raise GraphError(f"parameter {key!r} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def build_graph(kind, **params):
    """Construct one of the built-in graph families.

    Supported kinds: ``empty``, ``path``, ``cycle``, ``complete``, ``grid``,
    ``tree`` (complete b-ary), ``square`` (all pairs at base-distance 1 or 2)
    and ``edges`` (explicit edge list).
    """
    if kind == "empty":
        n = _check_positive_int(params, "n")
        return Graph(n, [], kind="empty", params=params)
    if kind == "path":
        n = _check_positive_int(params, "n")
        return Graph(n, [(i, i + 1) for i in range(n - 1)], kind="path", params=params)
    if kind == "cycle":
        n = _check_positive_int(params, "n", minimum=3)
        edges = [(i, (i + 1) % n) for i in range(n)]
        return Graph(n, edges, kind="cycle", params=params)
    if kind == "complete":
        n = _check_positive_int(params, "n")
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        return Graph(n, edges, kind="complete", params=params)
    if kind == "grid":
        rows = _check_positive_int(params, "rows")
        cols = _check_positive_int(params, "cols")
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return Graph(rows * cols, edges, kind="grid", params=params)
    if kind == "tree":
        b = _check_positive_int(params, "branching")
        h = _check_positive_int(params, "height", minimum=0)
        # complete b-ary tree of the given height; children of i are b*i+1..b*i+b
        n = sum(b**d for d in range(h + 1)) if b > 1 else h + 1
        edges = []
        for v in range(1, n):
            edges.append(((v - 1) // b, v))
        return Graph(n, edges, kind="tree", params=params)
    if kind == "square":
        base = params.get("base")
        if not isinstance(base, Graph):
            raise GraphError("square graphs need base=<Graph>")
        edges = set()
        for u in range(base.n):
            for w in base.neighbors(u):
                if u < w:
                    edges.add((u, int(w)))
                for z in base.neighbors(int(w)):
                    if u < z:
                        edges.add((u, int(z)))
        return Graph(base.n, sorted(edges), kind="square",
                     params={"base_kind": base.kind}, base=base)
    if kind == "edges":
        n = _check_positive_int(params, "n")
        edges = params.get("edges")
        if edges is None:
            raise GraphError("explicit graphs need edges=[[u,v],...]")
        return Graph(n, [tuple(e) for e in edges], kind="edges",
                     params={"n": n})
    raise GraphError(f"unknown graph kind {kind!r}")


def graph_from_spec(spec):
    """Load a graph from its JSON form.

    Accepts ``{"kind": "...", "params": {...}}`` and the explicit form
    ``{"kind": "edges", "n": N, "edges": [[u, v], ...]}``.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise GraphError(f"bad graph spec: {spec!r}")
    kind = spec["kind"]
    if kind == "edges":
        return build_graph("edges", n=spec["n"], edges=spec["edges"])
    params = dict(spec.get("params", {}))
    if kind == "square":
        params["base"] = graph_from_spec(params.pop("base_spec", params.pop("base", None)))
    return build_graph(kind, **params)


def distance_map(g, sources):
    """BFS distances from a set of source vertices; inf where unreachable."""
    dist = np.full(g.n, UNREACHABLE)
    queue = deque()
    for s in sorted(sources):
        if not 0 <= s < g.n:
            raise GraphError(f"vertex {s} out of range")
        dist[s] = 0
        queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u]
        for w in g.neighbors(u):
            if dist[w] == UNREACHABLE:
                dist[w] = du + 1
                queue.append(int(w))
    return dist


def distance(g, u, v):
    """Shortest-path length between u and v (inf if disconnected)."""
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise GraphError(f"vertex pair ({u},{v}) out of range")
    if u == v:
        return 0
    dist = distance_map(g, [u])
    return dist[v] if dist[v] != UNREACHABLE else UNREACHABLE


def set_distance(g, a, b):
    """Shortest distance between two vertex sets."""
    if not a or not b:
        raise GraphError("set_distance needs nonempty sets")
    dist = distance_map(g, a)
    best = min(dist[v] for v in b)
    return best if best != UNREACHABLE else UNREACHABLE


def ball(g, v, r):
    """All vertices at distance <= r from v."""
    if r < 0:
        raise GraphError(f"radius must be >= 0, got {r}")
    dist = distance_map(g, [v])
    return frozenset(int(u) for u in np.nonzero(dist <= r)[0])


def boundary(g, s, mode="external"):
    """Boundary of a vertex set.

    ``external``: vertices outside ``s`` adjacent to it.
    ``internal``: vertices inside ``s`` adjacent to the outside.
    """
    members = set(s)
    for v in members:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range")
    if mode == "external":
        out = set()
        for v in members:
            for w in g.neighbors(v):
                if int(w) not in members:
                    out.add(int(w))
        return frozenset(out)
    if mode == "internal":
        out = set()
        for v in members:
            if any(int(w) not in members for w in g.neighbors(v)):
                out.add(v)
        return frozenset(out)
    raise GraphError(f"unknown boundary mode {mode!r}")


def pack_centers(g, min_dist):
    """Greedy maximal set of vertices with pairwise distance >= min_dist.

    Vertices are scanned in id order, so the result is deterministic: a
    vertex is taken whenever it is at distance >= min_dist from everything
    taken before it.  Consequently every remaining vertex lies within
    min_dist-1 of some center.
    """
    if min_dist < 1:
        raise GraphError(f"min_dist must be >= 1, got {min_dist}")
    blocked = np.zeros(g.n, dtype=bool)
    stamp = np.full(g.n, -1, dtype=np.int64)
    centers = []
    for v in range(g.n):
        if blocked[v]:
            continue
        centers.append(v)
        # BFS out to radius min_dist-1 marking vertices too close to v;
        # the visited stamp is per-center so overlapping balls are fully marked
        blocked[v] = True
        stamp[v] = v
        frontier = [v]
        for _ in range(min_dist - 1):
            nxt = []
            for u in frontier:
                for w in g.neighbors(u):
                    if stamp[w] != v:
                        stamp[w] = v
                        blocked[w] = True
                        nxt.append(int(w))
            frontier = nxt
    return centers
