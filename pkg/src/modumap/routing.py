"""Greedy SWAP-insertion routing over a coupling map.

Coupling edges may be used in either direction. When a two-qubit gate's
operands are ``d > 1`` hops apart, the operand on the lower physical index
walks the lexicographically smallest shortest path toward the other with
``d - 1`` SWAPs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .circuit import SWAP, Circuit, Instruction, is_two_qubit_op
from .errors import RoutingError, RoutingVerificationError


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit
    swap_count: int
    # final_mapping[v]: physical position of the qubit that started on v
    final_mapping: tuple[int, ...]
    source: Circuit
    inserted: frozenset = frozenset()
    # source index of each barrier -> placement in effect at that barrier
    snapshots: Mapping[int, tuple[int, ...]] = field(default_factory=dict)


class _Undirected:
    def __init__(self, coupling: Iterable[tuple[int, int]], n: int):
        self.n = n
        adj = [set() for _ in range(n)]
        for u, v in coupling:
            if not (0 <= u < n and 0 <= v < n):
                continue
            adj[u].add(v)
            adj[v].add(u)
        self.adj = [sorted(s) for s in adj]
        self._dist_to: dict[int, list[int]] = {}

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def dist_to(self, t: int) -> list[int]:
        if t not in self._dist_to:
            dist = [-1] * self.n
            dist[t] = 0
            q = deque([t])
            while q:
                u = q.popleft()
                for v in self.adj[u]:
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        q.append(v)
            self._dist_to[t] = dist
        return self._dist_to[t]

    def path(self, s: int, t: int):
        dist = self.dist_to(t)
        if dist[s] < 0:
            return None
        out = [s]
        while out[-1] != t:
            cur = out[-1]
            out.append(min(v for v in self.adj[cur] if dist[v] == dist[cur] - 1))
        return out


def route(c: Circuit, coupling: Iterable[tuple[int, int]]) -> RoutedCircuit:
    """Insert SWAPs so every two-qubit gate of ``c`` acts on coupled qubits."""
    graph = _Undirected(coupling, c.num_qubits)
    pos = list(range(c.num_qubits))   # virtual -> physical
    occ = list(range(c.num_qubits))   # physical -> virtual
    out: list[Instruction] = []
    inserted = []
    snapshots = {}
    for k, inst in enumerate(c.instructions):
        if inst.is_barrier:
            snapshots[k] = tuple(pos)
        elif is_two_qubit_op(inst):
            pa, pb = pos[inst.qubits[0]], pos[inst.qubits[1]]
            if not graph.adjacent(pa, pb):
                mover, target = min(pa, pb), max(pa, pb)
                path = graph.path(mover, target)
                if path is None:
                    raise RoutingError(
                        f"instruction {k} ({inst.name}): physical qubits {pa} and {pb} are disconnected")
                for x, y in zip(path[:-2], path[1:-1]):
                    inserted.append(len(out))
                    out.append(Instruction(SWAP, (x, y), original_index=inst.original_index))
                    vx, vy = occ[x], occ[y]
                    occ[x], occ[y] = vy, vx
                    pos[vx], pos[vy] = y, x
        out.append(inst.remap(pos))
    return RoutedCircuit(Circuit(c.num_qubits, tuple(out), c.num_clbits), len(inserted),
                         tuple(pos), c, frozenset(inserted), snapshots)


def verify_routed(rc: RoutedCircuit, coupling: Iterable[tuple[int, int]]) -> None:
    """Replay ``rc`` against its source; raise on adjacency or mapping failures."""
    out = rc.circuit
    graph = _Undirected(coupling, out.num_qubits)
    src = list(rc.source.instructions)
    pos = list(range(out.num_qubits))
    occ = list(range(out.num_qubits))
    cursor = 0
    for k, inst in enumerate(out.instructions):
        if is_two_qubit_op(inst) and not graph.adjacent(*inst.qubits):
            raise RoutingVerificationError(
                f"{inst.name} on uncoupled qubits {inst.qubits}", k)
        if k in rc.inserted:
            if inst.name != SWAP:
                raise RoutingVerificationError("inserted instruction is not a swap", k)
            x, y = inst.qubits
            vx, vy = occ[x], occ[y]
            occ[x], occ[y] = vy, vx
            pos[vx], pos[vy] = y, x
            continue
        if cursor >= len(src):
            raise RoutingVerificationError("routed circuit has extra instructions", k)
        expected = src[cursor].remap(pos)
        if expected != inst:
            raise RoutingVerificationError(
                f"mapping inconsistency: expected {expected.name}{expected.qubits}, "
                f"found {inst.name}{inst.qubits}", k)
        cursor += 1
    if cursor != len(src):
        raise RoutingVerificationError(f"{len(src) - cursor} source instructions missing")
    if tuple(pos) != tuple(rc.final_mapping):
        raise RoutingVerificationError("final mapping does not match the replayed SWAPs")
    if rc.swap_count != len(rc.inserted):
        raise RoutingVerificationError("swap_count disagrees with the inserted SWAPs")
