"""QPU interconnect graphs, hop distances, traffic matrices and link loads.

Vertices ``0 .. num_qpus-1`` are QPUs. Switched fabrics (``clos`` and
``fat_tree``) append internal switch vertices after the QPUs; those relay
traffic and count as hops but never host logical qubits.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (AsymmetricTrafficError, IndexRangeError, InfeasibleRoutingError,
                     InvalidDistanceTableError, LinkLoadError, NegativeTrafficError,
                     NonFiniteTrafficError, TopologyError, TrafficDiagonalError,
                     TrafficShapeError)

UNREACHABLE = -1
TOPOLOGY_KINDS = ("switch", "mesh", "ring", "degree_bounded", "clos", "fat_tree")
ROUTING_MODES = ("single_path", "ecmp")


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class QpuGraph:
    num_qpus: int
    edges: tuple[tuple[int, int], ...]
    link_capacity: Mapping[tuple[int, int], float]
    topology_kind: str = "mesh"
    num_vertices: int = -1
    switch_pair_limit: Optional[int] = None
    switch_reconfig_delay: float = 0.0
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        nv = self.num_qpus if self.num_vertices < 0 else self.num_vertices
        object.__setattr__(self, "num_vertices", nv)
        edges = tuple(sorted({_edge(u, v) for u, v in self.edges}))
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            if u == v or not (0 <= u < nv and 0 <= v < nv):
                raise TopologyError(f"invalid QPU-graph edge ({u}, {v})")
        cap = {}
        for e, c in dict(self.link_capacity).items():
            cap[_edge(*e)] = float(c)
        for e in edges:
            c = cap.setdefault(e, 1.0)
            if not (math.isfinite(c) and c > 0):
                raise TopologyError(f"link capacity on {e} must be finite and positive, got {c}")
        if set(cap) - set(edges):
            raise TopologyError(f"capacities given for non-edges: {sorted(set(cap) - set(edges))}")
        object.__setattr__(self, "link_capacity", cap)
        if self.switch_pair_limit is not None and self.switch_pair_limit < 1:
            raise TopologyError("switch_pair_limit must be a positive integer")
        if not (math.isfinite(self.switch_reconfig_delay) and self.switch_reconfig_delay >= 0):
            raise TopologyError("switch_reconfig_delay must be finite and nonnegative")
        adj: list[list[int]] = [[] for _ in range(nv)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "_cache", {})

    @property
    def adjacency(self) -> list[list[int]]:
        return self._adj

    @property
    def edge_index(self) -> dict[tuple[int, int], int]:
        if "edge_index" not in self._cache:
            self._cache["edge_index"] = {e: k for k, e in enumerate(self.edges)}
        return self._cache["edge_index"]

    @property
    def is_switched(self) -> bool:
        return self.switch_pair_limit is not None

    def qpu_neighbors(self, a: int) -> list[int]:
        """QPUs reachable from ``a`` directly or through internal switch vertices only.

        For graphs without internal vertices this is plain adjacency.
        """
        seen = {a}
        out = set()
        stack = [a]
        while stack:
            u = stack.pop()
            for v in self._adj[u]:
                if v in seen:
                    continue
                seen.add(v)
                if v < self.num_qpus:
                    out.add(v)
                else:
                    stack.append(v)
        return sorted(out)


def build_qpu_graph(kind: str, num_qpus: int, link_capacity: float = 1.0,
                    switch_pair_limit: Optional[int] = None,
                    switch_reconfig_delay: float = 0.0, **params) -> QpuGraph:
    """Construct one of the interconnect abstractions.

    ``degree_bounded`` takes ``k`` (max degree, ``1 <= k < N``); ``clos`` takes
    ``m`` spine switches; ``fat_tree`` takes ``levels >= 1`` and ``arity >= 2``.
    ``switch`` is a full crossbar (complete graph) with a per-round limit on the
    number of distinct QPU pairs, by default ``max(1, N // 2)``.
    """
    n = int(num_qpus)
    if n < 1:
        raise TopologyError(f"num_qpus must be >= 1, got {num_qpus}")
    cap = float(link_capacity)
    if not (math.isfinite(cap) and cap > 0):
        raise TopologyError(f"link_capacity must be finite and positive, got {link_capacity}")
    edges: list[tuple[int, int]] = []
    caps: dict[tuple[int, int], float] = {}
    nv = n
    used: dict[str, object] = {}

    if kind in ("mesh", "switch"):
        edges = [(a, b) for a in range(n) for b in range(a + 1, n)]
        if kind == "switch" and switch_pair_limit is None:
            switch_pair_limit = max(1, n // 2)
    elif kind == "ring":
        if n == 2:
            edges = [(0, 1)]
        elif n > 2:
            edges = [(a, (a + 1) % n) for a in range(n)]
    elif kind == "degree_bounded":
        k = int(params.pop("k", 2))
        used["k"] = k
        if not 1 <= k < n:
            raise TopologyError(f"degree_bounded requires 1 <= k < N, got k={k}, N={n}")
        offsets = list(range(1, min(k // 2, (n - 1) // 2) + 1))
        if k % 2 == 1 and n % 2 == 0:
            offsets.append(n // 2)
        es = set()
        for s in offsets:
            for a in range(n):
                b = (a + s) % n
                if a != b:
                    es.add(_edge(a, b))
        edges = sorted(es)
    elif kind == "clos":
        m = int(params.pop("m", 2))
        used["m"] = m
        if m < 1:
            raise TopologyError(f"clos requires m >= 1 spine switches, got {m}")
        if n > 1:
            nv = n + m
            edges = [(a, n + s) for a in range(n) for s in range(m)]
    elif kind == "fat_tree":
        levels = int(params.pop("levels", 2))
        arity = int(params.pop("arity", 2))
        used["levels"] = levels
        used["arity"] = arity
        if levels < 1:
            raise TopologyError(f"fat_tree requires levels >= 1, got {levels}")
        if arity < 2:
            raise TopologyError(f"fat_tree requires arity >= 2, got {arity}")
        if n > 1:
            # (vertex, number of QPU leaves below it)
            current = [(a, 1) for a in range(n)]
            nxt_id = n
            for level in range(1, levels + 1):
                if len(current) == 1:
                    break
                group = len(current) if level == levels else arity
                parents = []
                for start in range(0, len(current), group):
                    chunk = current[start:start + group]
                    parent = nxt_id
                    nxt_id += 1
                    for child, leaves in chunk:
                        e = _edge(child, parent)
                        edges.append(e)
                        caps[e] = cap * leaves
                    parents.append((parent, sum(lv for _, lv in chunk)))
                current = parents
            if len(current) > 1:
                raise TopologyError("fat_tree construction left multiple roots")
            nv = nxt_id
    else:
        raise TopologyError(f"unknown QPU topology {kind!r}; expected one of {TOPOLOGY_KINDS}")
    if params:
        raise TopologyError(f"unexpected parameters for {kind}: {sorted(params)}")
    for e in edges:
        caps.setdefault(_edge(*e), cap)
    if kind != "switch" and switch_pair_limit is not None:
        raise TopologyError("switch_pair_limit only applies to the switch topology")
    return QpuGraph(n, tuple(edges), caps, kind, nv, switch_pair_limit,
                    float(switch_reconfig_delay), used)


# --------------------------------------------------------------------------
# distances


@dataclass(frozen=True)
class DistanceTable:
    """Hop counts between all vertices; :data:`UNREACHABLE` marks missing paths."""

    dist: np.ndarray

    def __call__(self, a: int, b: int) -> Optional[int]:
        d = int(self.dist[a, b])
        return None if d == UNREACHABLE else d

    def connected(self, a: int, b: int) -> bool:
        return int(self.dist[a, b]) != UNREACHABLE

    @property
    def size(self) -> int:
        return self.dist.shape[0]


def _bfs(adj: Sequence[Sequence[int]], src: int) -> list[int]:
    dist = [UNREACHABLE] * len(adj)
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def all_pairs_distances(g: QpuGraph) -> DistanceTable:
    if "apsp" not in g._cache:
        rows = [_bfs(g.adjacency, s) for s in range(g.num_vertices)]
        arr = np.array(rows, dtype=np.int64).reshape(g.num_vertices, g.num_vertices)
        arr.setflags(write=False)
        g._cache["apsp"] = DistanceTable(arr)
    return g._cache["apsp"]


def validate_distance_table(dt: DistanceTable, num_qpus: Optional[int] = None) -> None:
    """Reject non-square, asymmetric, negative, nonzero-diagonal or
    triangle-violating tables."""
    d = np.asarray(dt.dist)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidDistanceTableError(f"distance table must be square, got shape {d.shape}")
    if num_qpus is not None and d.shape[0] < num_qpus:
        raise InvalidDistanceTableError(
            f"distance table covers {d.shape[0]} vertices, need at least {num_qpus}")
    if not np.issubdtype(d.dtype, np.integer):
        if not np.all(np.isfinite(d)) or not np.all(d == np.round(d)):
            raise InvalidDistanceTableError("distance entries must be integral hop counts")
    if not np.array_equal(d, d.T):
        raise InvalidDistanceTableError("distance table is not symmetric")
    if np.any(np.diag(d) != 0):
        raise InvalidDistanceTableError("distance table has a nonzero diagonal")
    if np.any((d < 0) & (d != UNREACHABLE)):
        raise InvalidDistanceTableError("distance table has negative entries")
    reach = d != UNREACHABLE
    big = np.where(reach, d, np.iinfo(np.int64).max // 4)
    # min over k of d(i,k)+d(k,j) must not undercut d(i,j)
    via = np.min(big[:, :, None] + big[None, :, :], axis=1)
    if np.any(via < big):
        raise InvalidDistanceTableError("distance table violates the triangle inequality")


# --------------------------------------------------------------------------
# traffic


@dataclass(frozen=True)
class TrafficMatrix:
    t: np.ndarray

    def __post_init__(self):
        arr = np.array(self.t, dtype=float)
        validate_traffic_matrix(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "t", arr)

    @property
    def num_qpus(self) -> int:
        return self.t.shape[0]

    def pairs(self) -> list[tuple[int, int, float]]:
        """Upper-triangle entries with positive traffic, in row-major order."""
        n = self.num_qpus
        return [(a, b, float(self.t[a, b]))
                for a in range(n) for b in range(a + 1, n) if self.t[a, b] > 0]


def validate_traffic_matrix(t) -> None:
    arr = np.asarray(t, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise TrafficShapeError(f"traffic matrix must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteTrafficError("traffic matrix has non-finite entries")
    if np.any(arr < 0):
        raise NegativeTrafficError("traffic matrix has negative entries")
    if not np.array_equal(arr, arr.T):
        raise AsymmetricTrafficError("traffic matrix is not symmetric")
    if np.any(np.diag(arr) != 0):
        raise TrafficDiagonalError("traffic matrix has a nonzero diagonal")


def traffic_matrix(g_l, pi: Sequence[int], num_qpus: int) -> TrafficMatrix:
    """``T[a, b]``: total interaction weight between qubits on QPUs ``a != b``."""
    if len(pi) != g_l.num_qubits:
        raise IndexRangeError(f"partition has length {len(pi)}, expected {g_l.num_qubits}")
    for q in pi:
        if not 0 <= q < num_qpus:
            raise IndexRangeError(f"partition entry {q} out of range [0, {num_qpus})")
    t = np.zeros((num_qpus, num_qpus))
    for (i, j), w in g_l.weights.items():
        a, b = pi[i], pi[j]
        if a != b:
            t[a, b] += w
            t[b, a] += w
    return TrafficMatrix(t)


# --------------------------------------------------------------------------
# routing


@dataclass(frozen=True)
class LinkLoads:
    load: Mapping[tuple[int, int], float]

    def validate(self, g: Optional[QpuGraph] = None) -> None:
        for e, v in self.load.items():
            if g is not None and e not in g.link_capacity:
                raise LinkLoadError(f"load reported for non-edge {e}")
            if not math.isfinite(v) or v < 0:
                raise LinkLoadError(f"invalid load {v} on edge {e}")

    def as_array(self, g: QpuGraph) -> np.ndarray:
        return np.array([self.load.get(e, 0.0) for e in g.edges])


@dataclass(frozen=True)
class ShortestPathDag:
    source: int
    dist: tuple[int, ...]
    preds: tuple[tuple[int, ...], ...]
    sigma: tuple[int, ...]


def shortest_path_dag(g: QpuGraph, source: int) -> ShortestPathDag:
    """BFS DAG from ``source`` with shortest-path counts ``sigma``."""
    key = ("dag", source)
    if key in g._cache:
        return g._cache[key]
    nv = g.num_vertices
    dist = [UNREACHABLE] * nv
    sigma = [0] * nv
    preds: list[list[int]] = [[] for _ in range(nv)]
    dist[source], sigma[source] = 0, 1
    q = deque([source])
    while q:
        u = q.popleft()
        for v in g.adjacency[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = dist[u] + 1
                q.append(v)
            if dist[v] == dist[u] + 1:
                sigma[v] += sigma[u]
                preds[v].append(u)
    dag = ShortestPathDag(source, tuple(dist), tuple(tuple(sorted(p)) for p in preds), tuple(sigma))
    g._cache[key] = dag
    return dag


def lexicographic_path(g: QpuGraph, a: int, b: int) -> Optional[list[int]]:
    """Lexicographically smallest vertex sequence among shortest ``a``-``b`` paths."""
    to_b = shortest_path_dag(g, b).dist
    if to_b[a] == UNREACHABLE:
        return None
    path = [a]
    cur = a
    while cur != b:
        cur = min(v for v in g.adjacency[cur] if to_b[v] == to_b[cur] - 1)
        path.append(cur)
    return path


def path_edges(path: Sequence[int]) -> list[tuple[int, int]]:
    return [_edge(path[k], path[k + 1]) for k in range(len(path) - 1)]


def ecmp_pair_loads(g: QpuGraph, a: int, b: int, w: float) -> Optional[dict[tuple[int, int], float]]:
    """Per-edge share of ``w`` units sent from ``a`` to ``b`` under ECMP.

    Flow is pushed backward from ``b``; at each vertex it splits over the
    shortest-path predecessors ``u`` in proportion ``sigma(u) / sigma(v)``.
    Returns ``None`` when ``b`` is unreachable.
    """
    dag = shortest_path_dag(g, a)
    if dag.dist[b] == UNREACHABLE:
        return None
    loads: dict[tuple[int, int], float] = {}
    if a == b or w == 0:
        return loads
    inflow = {b: float(w)}
    frontier = [b]
    for _ in range(dag.dist[b]):
        nxt: dict[int, float] = {}
        for v in frontier:
            f = inflow.pop(v)
            sv = dag.sigma[v]
            for u in dag.preds[v]:
                share = f * dag.sigma[u] / sv
                e = _edge(u, v)
                loads[e] = loads.get(e, 0.0) + share
                nxt[u] = nxt.get(u, 0.0) + share
        inflow.update(nxt)
        frontier = sorted(nxt)
    return loads


def unit_pair_loads(g: QpuGraph, mode: str) -> dict[tuple[int, int], Optional[dict]]:
    """Edge shares for one unit of traffic on every QPU pair ``a < b``.

    ``None`` entries mark disconnected pairs. Cached per graph and mode.
    """
    if mode not in ROUTING_MODES:
        raise ValueError(f"unknown routing mode {mode!r}; expected one of {ROUTING_MODES}")
    key = ("unit", mode)
    if key not in g._cache:
        out = {}
        for a in range(g.num_qpus):
            for b in range(a + 1, g.num_qpus):
                if mode == "ecmp":
                    out[(a, b)] = ecmp_pair_loads(g, a, b, 1.0)
                else:
                    path = lexicographic_path(g, a, b)
                    out[(a, b)] = None if path is None else {e: 1.0 for e in path_edges(path)}
        g._cache[key] = out
    return g._cache[key]


def route_traffic(g: QpuGraph, tm: TrafficMatrix, mode: str) -> tuple[LinkLoads, list[tuple[int, int]]]:
    """Route every positive entry of ``tm``; returns loads and unroutable pairs."""
    if tm.num_qpus != g.num_qpus:
        raise TrafficShapeError(f"traffic matrix is {tm.num_qpus}x{tm.num_qpus}, graph has {g.num_qpus} QPUs")
    units = unit_pair_loads(g, mode)
    load = {e: 0.0 for e in g.edges}
    bad = []
    for a, b, w in tm.pairs():
        shares = units[(a, b)]
        if shares is None:
            bad.append((a, b))
            continue
        for e, s in shares.items():
            load[e] += w * s
    return LinkLoads(load), bad


def route_single_path(g: QpuGraph, dist: Optional[DistanceTable], tm: TrafficMatrix) -> LinkLoads:
    """Full traffic of each pair on its lexicographically smallest shortest path."""
    if dist is not None:
        validate_distance_table(dist, g.num_qpus)
    loads, bad = route_traffic(g, tm, "single_path")
    if bad:
        raise InfeasibleRoutingError(bad)
    return loads


def route_ecmp(g: QpuGraph, tm: TrafficMatrix) -> LinkLoads:
    loads, bad = route_traffic(g, tm, "ecmp")
    if bad:
        raise InfeasibleRoutingError(bad)
    return loads


def congestion_stats(loads: LinkLoads) -> dict[str, float]:
    vals = [float(v) for v in loads.load.values()]
    return {
        "max_load": max(vals, default=0.0),
        "sum_load": math.fsum(vals),
        "sum_sq_load": math.fsum(v * v for v in vals),
    }
