"""Logical-to-QPU assignment.

A partition is a plain list ``assign`` with ``assign[i]`` the QPU hosting
logical qubit ``i``. Every partitioner here keeps per-QPU load at or below
the capacity ``K = C + P``.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .errors import (CapacityExceededError, CapacityViolationError, IndexRangeError,
                     ParameterError, PartitionLengthError)
from .interaction import InteractionGraph, weighted_degree
from .network import (ROUTING_MODES, DistanceTable, QpuGraph, route_traffic,
                      traffic_matrix, unit_pair_loads, validate_distance_table)

ALGORITHMS = ("heavy_edge", "balanced_greedy", "tpccap", "tpccap_sa")
DEFAULT_PASS_LIMIT = 20
CANDIDATE_QPUS = 3
RESYNC_EVERY = 1000


@dataclass(frozen=True)
class ObjectiveParams:
    alpha: float = 1.0
    beta: float = 1.0
    eta: float = 0.5
    routing_mode: str = "ecmp"
    disconnected_penalty: float = 1e12

    def __post_init__(self):
        for name in ("alpha", "beta", "eta", "disconnected_penalty"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ParameterError(f"{name} must be finite and nonnegative, got {v}")
        if self.routing_mode not in ROUTING_MODES:
            raise ParameterError(f"routing_mode must be one of {ROUTING_MODES}, got {self.routing_mode!r}")


@dataclass(frozen=True)
class SaParams:
    """Annealing schedule. ``None`` fields resolve against the start state:
    ``initial_temp = max(1, J(start) / 10)`` and ``steps = 200 * n``."""

    initial_temp: Optional[float] = None
    cooling: float = 0.995
    steps: Optional[int] = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.initial_temp is not None and not (math.isfinite(self.initial_temp) and self.initial_temp > 0):
            raise ParameterError(f"initial_temp must be positive, got {self.initial_temp}")
        if not 0.0 < self.cooling < 1.0:
            raise ParameterError(f"cooling must lie in (0, 1), got {self.cooling}")
        if self.steps is not None and self.steps < 0:
            raise ParameterError(f"steps must be nonnegative, got {self.steps}")


@dataclass(frozen=True)
class ObjectiveTerms:
    total: float
    cut_distance_term: float
    port_term: float
    congestion_term: float
    penalty_term: float = 0.0
    unroutable_pairs: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------
# validation and metrics


def validate_partition_inputs(g: InteractionGraph, num_qpus: int, capacity: int) -> None:
    g.validate()
    if num_qpus < 1 or capacity < 1:
        raise ParameterError(f"need N >= 1 and K >= 1, got N={num_qpus}, K={capacity}")
    if g.num_qubits > num_qpus * capacity:
        raise CapacityExceededError(
            f"demand exceeds capacity: {g.num_qubits} qubits > {num_qpus} x {capacity}")


def _check_assign(assign: Sequence[int], n: int, num_qpus: Optional[int] = None) -> None:
    if len(assign) != n:
        raise PartitionLengthError(f"partition has length {len(assign)}, expected {n}")
    if num_qpus is not None:
        for q in assign:
            if not 0 <= q < num_qpus:
                raise IndexRangeError(f"partition entry {q} out of range [0, {num_qpus})")


def qpu_loads(assign: Sequence[int], num_qpus: int) -> list[int]:
    loads = [0] * num_qpus
    for q in assign:
        loads[q] += 1
    return loads


def check_capacity(assign: Sequence[int], num_qpus: int, capacity: int) -> None:
    _check_assign(assign, len(assign), num_qpus)
    for q, load in enumerate(qpu_loads(assign, num_qpus)):
        if load > capacity:
            raise CapacityViolationError(f"QPU {q} holds {load} qubits, capacity {capacity}")


def cut_weight(g: InteractionGraph, pi: Sequence[int]) -> float:
    _check_assign(pi, g.num_qubits)
    return math.fsum(w for (i, j), w in g.weights.items() if pi[i] != pi[j])


def boundary_counts(g: InteractionGraph, pi: Sequence[int], num_qpus: int) -> list[int]:
    """Per QPU, the number of its qubits with at least one cut interaction."""
    _check_assign(pi, g.num_qubits, num_qpus)
    boundary = set()
    for (i, j), w in g.weights.items():
        if w > 0 and pi[i] != pi[j]:
            boundary.add(i)
            boundary.add(j)
    counts = [0] * num_qpus
    for v in boundary:
        counts[pi[v]] += 1
    return counts


def objective(g: InteractionGraph, pi: Sequence[int], qg: QpuGraph, dist: DistanceTable,
              num_ports: int, params: ObjectiveParams = ObjectiveParams()) -> ObjectiveTerms:
    """Weighted cut distance + port overflow + routed congestion.

    Cut pairs whose QPUs are disconnected contribute no distance; each such
    traffic pair instead adds ``disconnected_penalty`` to the total.
    """
    n_q = qg.num_qpus
    _check_assign(pi, g.num_qubits, n_q)
    validate_distance_table(dist, n_q)
    cut_dist = 0.0
    for (i, j), w in g.weights.items():
        a, b = pi[i], pi[j]
        if a != b and dist.connected(a, b):
            cut_dist += w * int(dist.dist[a, b])
    overflow = sum(max(0, bq - num_ports) ** 2 for bq in boundary_counts(g, pi, n_q))
    loads, bad = route_traffic(qg, traffic_matrix(g, pi, n_q), params.routing_mode)
    sq = math.fsum(v * v for v in loads.load.values())
    cd, pt, ct = params.alpha * cut_dist, params.beta * overflow, params.eta * sq
    pen = params.disconnected_penalty * len(bad)
    return ObjectiveTerms(cd + pt + ct + pen, cd, pt, ct, pen, len(bad))


class ObjectiveState:
    """Incremental evaluator for the partition objective.

    Tracks link loads, cut distance and boundary counts for the current
    assignment so a single move or a swap is priced in time proportional to
    the moved qubits' degree. A full recomputation runs every
    :data:`RESYNC_EVERY` committed changes to bound floating-point drift.
    """

    def __init__(self, g: InteractionGraph, assign: Sequence[int], qg: QpuGraph,
                 dist: DistanceTable, num_ports: int, params: ObjectiveParams):
        self.g = g
        self.nbrs = g.neighbors()
        self.n = g.num_qubits
        self.N = N = qg.num_qpus
        self.P = num_ports
        self.params = params
        self.n_edges = len(qg.edges)
        eidx = qg.edge_index
        # unit[a][b]: ((edge index, share), ...) for one unit a->b, None if disconnected
        self.unit = [[() for _ in range(N)] for _ in range(N)]
        for (x, y), shares in unit_pair_loads(qg, params.routing_mode).items():
            u = None if shares is None else tuple((eidx[e], shares[e]) for e in sorted(shares))
            self.unit[x][y] = self.unit[y][x] = u
        self.d = [[(int(dist.dist[x, y]) if dist.connected(x, y) else None)
                   for y in range(N)] for x in range(N)]
        self.reset(assign)

    def reset(self, assign: Sequence[int]) -> None:
        self.assign = list(assign)
        self.load = qpu_loads(self.assign, self.N)
        traffic: dict[tuple[int, int], float] = {}
        # cut-edge multiplicity per disconnected QPU pair
        self.dead: dict[tuple[int, int], int] = {}
        self.ext = [0] * self.n
        cut = 0.0
        for (i, j), w in sorted(self.g.weights.items()):
            if w == 0:
                continue
            a, b = self.assign[i], self.assign[j]
            if a == b:
                continue
            pair = (a, b) if a < b else (b, a)
            traffic[pair] = traffic.get(pair, 0.0) + w
            self.ext[i] += 1
            self.ext[j] += 1
            if self.d[a][b] is not None:
                cut += w * self.d[a][b]
            else:
                self.dead[pair] = self.dead.get(pair, 0) + 1
        self.cut = cut
        self.boundary = [0] * self.N
        for v in range(self.n):
            if self.ext[v] > 0:
                self.boundary[self.assign[v]] += 1
        self.overflow = sum(max(0, b - self.P) ** 2 for b in self.boundary)
        self.L = [0.0] * self.n_edges
        for (a, b), t in sorted(traffic.items()):
            u = self.unit[a][b]
            if u is not None:
                for k, frac in u:
                    self.L[k] += t * frac
        self.bad = len(self.dead)
        self.sq = math.fsum(x * x for x in self.L)
        self.J = self._total(self.cut, self.overflow, self.sq, self.bad)
        self._since_reset = 0

    def _total(self, cut, overflow, sq, bad) -> float:
        p = self.params
        return p.alpha * cut + p.beta * overflow + p.eta * sq + p.disconnected_penalty * bad

    def evaluate(self, moves: dict[int, int]):
        """Objective after a single move ``{v: q}`` or a swap ``{x: pi(y), y: pi(x)}``.

        Nothing is changed; returns ``(J_new, pending)`` for :meth:`commit`.
        """
        assign = self.assign
        moves = {v: q for v, q in moves.items() if assign[v] != q}
        if not moves:
            return self.J, None
        if len(moves) == 2:
            (x, qx), (y, qy) = moves.items()
            if not (qx == assign[y] and qy == assign[x]):
                raise ValueError("two-qubit reassignments must be swaps")
        elif len(moves) > 2:
            raise ValueError("only single moves and swaps are evaluated incrementally")
        ext = self.ext
        N = self.N
        d = self.d
        unit = self.unit
        d_load: dict[int, float] = {}
        d_dead: dict[tuple[int, int], int] = {}
        d_ext: dict[int, int] = {}
        d_boundary: dict[int, int] = {}
        d_cut = 0.0
        partner_of = {}
        if len(moves) == 2:
            partner_of = {x: y, y: x}
        for v, q in moves.items():
            a = assign[v]
            partner = partner_of.get(v, -1)
            conn = [0.0] * N
            cnt = [0] * N
            seen = []
            for u, w in self.nbrs[v]:
                if u == partner:
                    continue
                r = assign[u]
                if not cnt[r]:
                    seen.append(r)
                conn[r] += w
                cnt[r] += 1
                if r == a:
                    d_ext[u] = d_ext.get(u, 0) + 1
                elif r == q:
                    d_ext[u] = d_ext.get(u, 0) - 1
            da, dq, ua, uq = d[a], d[q], unit[a], unit[q]
            for r in seen:
                c = conn[r]
                if r != a:
                    path = ua[r]
                    if path is None:
                        pair = (a, r) if a < r else (r, a)
                        d_dead[pair] = d_dead.get(pair, 0) - cnt[r]
                    else:
                        d_cut -= c * da[r]
                        for k, frac in path:
                            d_load[k] = d_load.get(k, 0.0) - c * frac
                if r != q:
                    path = uq[r]
                    if path is None:
                        pair = (q, r) if q < r else (r, q)
                        d_dead[pair] = d_dead.get(pair, 0) + cnt[r]
                    else:
                        d_cut += c * dq[r]
                        for k, frac in path:
                            d_load[k] = d_load.get(k, 0.0) + c * frac
            # a swap partner ends on a QPU other than q, so it stays external
            e_old = ext[v]
            e_new = len(self.nbrs[v]) - cnt[q]
            if e_new != e_old:
                d_ext[v] = e_new - e_old
            d_boundary[a] = d_boundary.get(a, 0) - (e_old > 0)
            d_boundary[q] = d_boundary.get(q, 0) + (e_new > 0)
        for z, dz in d_ext.items():
            if dz == 0 or z in moves:
                continue
            e = ext[z]
            change = (e + dz > 0) - (e > 0)
            if change:
                r = assign[z]
                d_boundary[r] = d_boundary.get(r, 0) + change

        overflow = self.overflow
        P = self.P
        boundary = self.boundary
        for r, db in d_boundary.items():
            if db:
                old = boundary[r]
                overflow += max(0, old + db - P) ** 2 - max(0, old - P) ** 2
        bad = self.bad
        for pair, dc in d_dead.items():
            c_old = self.dead.get(pair, 0)
            bad += (c_old + dc > 0) - (c_old > 0)
        sq = self.sq
        L = self.L
        new_load = {}
        for k, dl in d_load.items():
            old = L[k]
            new = old + dl
            new_load[k] = new
            sq += new * new - old * old
        cut = self.cut + d_cut
        J = self._total(cut, overflow, sq, bad)
        return J, (moves, d_dead, d_ext, d_boundary, new_load, cut, overflow, sq, bad, J)

    def commit(self, pending) -> None:
        if pending is None:
            return
        moves, d_dead, d_ext, d_boundary, new_load, cut, overflow, sq, bad, J = pending
        for v, q in moves.items():
            self.load[self.assign[v]] -= 1
            self.load[q] += 1
            self.assign[v] = q
        for pair, dc in d_dead.items():
            c = self.dead.get(pair, 0) + dc
            if c:
                self.dead[pair] = c
            else:
                self.dead.pop(pair, None)
        for z, de in d_ext.items():
            self.ext[z] += de
        for r, db in d_boundary.items():
            self.boundary[r] += db
        for k, x in new_load.items():
            self.L[k] = x
        self.cut, self.overflow, self.sq, self.bad, self.J = cut, overflow, sq, bad, J
        self._since_reset += 1
        if self._since_reset >= RESYNC_EVERY:
            self.reset(self.assign)


# --------------------------------------------------------------------------
# partitioners


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def heavy_edge_partition(g: InteractionGraph, num_qpus: int, capacity: int) -> list[int]:
    """Merge components along heaviest edges while they fit, then first-fit
    decreasing. Components that fit nowhere are broken into singletons."""
    validate_partition_inputs(g, num_qpus, capacity)
    n = g.num_qubits
    ds = _DisjointSet(n)
    for i, j, w in sorted(g.edges, key=lambda e: (-e[2], e[0], e[1])):
        ri, rj = ds.find(i), ds.find(j)
        if ri != rj and ds.size[ri] + ds.size[rj] <= capacity:
            ds.union(ri, rj)
    comps: dict[int, list[int]] = {}
    for v in range(n):
        comps.setdefault(ds.find(v), []).append(v)
    ordered = sorted(comps.values(), key=lambda c: (-len(c), c[0]))
    assign = [-1] * n
    free = [capacity] * num_qpus
    leftovers = []
    for comp in ordered:
        for q in range(num_qpus):
            if free[q] >= len(comp):
                for v in comp:
                    assign[v] = q
                free[q] -= len(comp)
                break
        else:
            leftovers.extend(comp)
    for v in sorted(leftovers):
        q = next(q for q in range(num_qpus) if free[q] > 0)
        assign[v] = q
        free[q] -= 1
    return assign


def _refine_cut(g: InteractionGraph, assign: list[int], num_qpus: int, capacity: int,
                rng: random.Random, pass_limit: int) -> list[int]:
    nbrs = g.neighbors()
    load = qpu_loads(assign, num_qpus)
    order = list(range(g.num_qubits))
    for _ in range(pass_limit):
        rng.shuffle(order)
        moved = False
        for v in order:
            conn = [0.0] * num_qpus
            for u, w in nbrs[v]:
                conn[assign[u]] += w
            cur = assign[v]
            best, best_gain = None, 0.0
            for q in range(num_qpus):
                if q == cur or load[q] >= capacity:
                    continue
                gain = conn[q] - conn[cur]
                if gain > best_gain:
                    best, best_gain = q, gain
            if best is not None:
                load[cur] -= 1
                load[best] += 1
                assign[v] = best
                moved = True
        if not moved:
            break
    return assign


def balanced_greedy_partition(g: InteractionGraph, num_qpus: int, capacity: int,
                              lam: float = 0.25, rng_seed: int = 0,
                              pass_limit: int = DEFAULT_PASS_LIMIT) -> list[int]:
    """Place qubits by descending weighted degree on the non-full QPU maximising
    ``affinity - lam * load / K``; then refine with cut-reducing moves."""
    validate_partition_inputs(g, num_qpus, capacity)
    if not (math.isfinite(lam) and lam >= 0):
        raise ParameterError(f"lambda must be finite and nonnegative, got {lam}")
    n = g.num_qubits
    nbrs = g.neighbors()
    order = sorted(range(n), key=lambda v: (-weighted_degree(g, v), v))
    assign = [-1] * n
    load = [0] * num_qpus
    for v in order:
        aff = [0.0] * num_qpus
        for u, w in nbrs[v]:
            if assign[u] >= 0:
                aff[assign[u]] += w
        best, best_score = -1, -math.inf
        for q in range(num_qpus):
            if load[q] >= capacity:
                continue
            score = aff[q] - lam * load[q] / capacity
            if score > best_score:
                best, best_score = q, score
        assign[v] = best
        load[best] += 1
    return _refine_cut(g, assign, num_qpus, capacity, random.Random(rng_seed), pass_limit)


def _tol(j: float) -> float:
    return 1e-12 * max(1.0, abs(j))


def tpccap_partition(g: InteractionGraph, qg: QpuGraph, dist: DistanceTable,
                     num_qpus: int, capacity: int, num_ports: int,
                     params: ObjectiveParams = ObjectiveParams(), rng_seed: int = 0,
                     pass_limit: int = DEFAULT_PASS_LIMIT, lam: float = 0.25,
                     start: Optional[Sequence[int]] = None) -> list[int]:
    """Best-improvement local search on the objective from the balanced-greedy start.

    For each qubit (randomised order) the candidate destinations are the
    three QPUs with the largest interaction weight to it, besides its own.
    """
    validate_partition_inputs(g, num_qpus, capacity)
    validate_distance_table(dist, num_qpus)
    if start is None:
        start = balanced_greedy_partition(g, num_qpus, capacity, lam, rng_seed, pass_limit)
    else:
        check_capacity(start, num_qpus, capacity)
    state = ObjectiveState(g, start, qg, dist, num_ports, params)
    rng = random.Random(rng_seed + 1)
    order = list(range(g.num_qubits))
    for _ in range(pass_limit):
        rng.shuffle(order)
        changed = False
        for v in order:
            cur = state.assign[v]
            aff = [0.0] * num_qpus
            for u, w in state.nbrs[v]:
                aff[state.assign[u]] += w
            cands = sorted((q for q in range(num_qpus) if q != cur and aff[q] > 0),
                           key=lambda q: (-aff[q], q))[:CANDIDATE_QPUS]
            best_j, best_pending = state.J, None
            for q in sorted(cands):
                if state.load[q] >= capacity:
                    continue
                j_new, pending = state.evaluate({v: q})
                if j_new < best_j - _tol(best_j):
                    best_j, best_pending = j_new, pending
            if best_pending is not None:
                state.commit(best_pending)
                changed = True
        if not changed:
            break
    return list(state.assign)


def _propose(rng: random.Random, assign: list[int], load: list[int], num_qpus: int,
             capacity: int) -> Optional[dict[int, int]]:
    """Uniform draw from the feasible single moves or, with equal odds, swaps.

    Cheap rejection sampling first; the exact fallbacks only run when most
    draws are infeasible (nearly full QPUs, or nearly everything on one QPU).
    """
    n = len(assign)
    randrange = rng.randrange
    want_move = rng.random() < 0.5
    for kind in ((True, False) if want_move else (False, True)):
        if kind:
            for _ in range(8):
                v, q = randrange(n), randrange(num_qpus)
                if assign[v] != q and load[q] < capacity:
                    return {v: q}
            weights = [(n - load[q]) if load[q] < capacity else 0 for q in range(num_qpus)]
            if sum(weights) == 0:
                continue
            q = rng.choices(range(num_qpus), weights=weights)[0]
            while True:
                v = randrange(n)
                if assign[v] != q:
                    return {v: q}
        else:
            if sum(1 for x in load if x > 0) < 2:
                continue
            while True:
                u, v = randrange(n), randrange(n)
                if assign[u] != assign[v]:
                    return {u: assign[v], v: assign[u]}
    return None


def tpccap_sa_partition(g: InteractionGraph, qg: QpuGraph, dist: DistanceTable,
                        num_qpus: int, capacity: int, num_ports: int,
                        params: ObjectiveParams = ObjectiveParams(), rng_seed: int = 0,
                        pass_limit: int = DEFAULT_PASS_LIMIT, sa: SaParams = SaParams(),
                        lam: float = 0.25, start: Optional[Sequence[int]] = None) -> list[int]:
    """Simulated annealing over capacity-preserving moves and swaps.

    Starts from the TPCCAP local-search result (or ``start``), cools the
    temperature geometrically every step, and returns the best state seen.
    """
    if start is None:
        start = tpccap_partition(g, qg, dist, num_qpus, capacity, num_ports, params,
                                 rng_seed, pass_limit, lam)
    else:
        validate_partition_inputs(g, num_qpus, capacity)
        check_capacity(start, num_qpus, capacity)
    state = ObjectiveState(g, start, qg, dist, num_ports, params)
    best, best_j = list(state.assign), state.J
    temp = sa.initial_temp if sa.initial_temp is not None else max(1.0, state.J / 10.0)
    steps = sa.steps if sa.steps is not None else 200 * g.num_qubits
    rng = random.Random(sa.rng_seed)
    for _ in range(steps):
        proposal = _propose(rng, state.assign, state.load, num_qpus, capacity)
        if proposal is not None:
            j_new, pending = state.evaluate(proposal)
            delta = j_new - state.J
            if delta <= 0 or rng.random() < math.exp(-delta / temp):
                state.commit(pending)
                if state.J < best_j - _tol(best_j):
                    best, best_j = list(state.assign), state.J
        temp *= sa.cooling
    return best


def run_partitioner(algorithm: str, g: InteractionGraph, qg: QpuGraph, dist: DistanceTable,
                    num_qpus: int, capacity: int, num_ports: int,
                    params: ObjectiveParams = ObjectiveParams(), lam: float = 0.25,
                    rng_seed: int = 0, pass_limit: int = DEFAULT_PASS_LIMIT,
                    sa: SaParams = SaParams()) -> list[int]:
    if algorithm == "heavy_edge":
        return heavy_edge_partition(g, num_qpus, capacity)
    if algorithm == "balanced_greedy":
        return balanced_greedy_partition(g, num_qpus, capacity, lam, rng_seed, pass_limit)
    if algorithm == "tpccap":
        return tpccap_partition(g, qg, dist, num_qpus, capacity, num_ports, params,
                                rng_seed, pass_limit, lam)
    if algorithm == "tpccap_sa":
        return tpccap_sa_partition(g, qg, dist, num_qpus, capacity, num_ports, params,
                                   rng_seed, pass_limit, sa, lam)
    raise ParameterError(f"unknown partitioner {algorithm!r}; expected one of {ALGORITHMS}")
