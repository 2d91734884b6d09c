"""Modular machine description: QPU blocks, local topologies, coupling map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from .errors import ArchitectureError, IndexRangeError
from .network import QpuGraph, build_qpu_graph

LOCAL_TOPOLOGIES = ("clique", "line", "ring", "grid")


@dataclass(frozen=True)
class ArchitectureConfig:
    num_qpus: int
    compute_per_qpu: int
    comm_per_qpu: int = 0
    local_topology: str = "line"
    grid_shape: Optional[tuple[int, int]] = None
    # forwarded verbatim to build_qpu_graph
    qpu_topology: Mapping[str, Any] = field(default_factory=lambda: {"kind": "mesh"})

    def __post_init__(self):
        if self.num_qpus < 1:
            raise ArchitectureError(f"num_qpus must be >= 1, got {self.num_qpus}")
        if self.compute_per_qpu < 1:
            raise ArchitectureError(f"compute_per_qpu must be >= 1, got {self.compute_per_qpu}")
        if self.comm_per_qpu < 0:
            raise ArchitectureError(f"comm_per_qpu must be >= 0, got {self.comm_per_qpu}")
        if self.local_topology not in LOCAL_TOPOLOGIES:
            raise ArchitectureError(
                f"unknown local topology {self.local_topology!r}; expected one of {LOCAL_TOPOLOGIES}")
        if self.local_topology == "grid":
            if self.grid_shape is None:
                raise ArchitectureError("grid topology needs grid_shape=(rows, cols)")
            rows, cols = self.grid_shape
            if rows < 1 or cols < 1 or rows * cols != self.block_size:
                raise ArchitectureError(
                    f"grid {rows}x{cols} does not match block size {self.block_size}")

    @property
    def block_size(self) -> int:
        return self.compute_per_qpu + self.comm_per_qpu


def _local_edges(kind: str, size: int, grid_shape=None) -> list[tuple[int, int]]:
    """Undirected edges over block positions ``0 .. size-1``."""
    if kind == "clique":
        return [(a, b) for a in range(size) for b in range(a + 1, size)]
    if kind == "line":
        return [(a, a + 1) for a in range(size - 1)]
    if kind == "ring":
        if size <= 2:
            return [(a, a + 1) for a in range(size - 1)]
        return [(a, a + 1) for a in range(size - 1)] + [(0, size - 1)]
    rows, cols = grid_shape
    out = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            if c + 1 < cols:
                out.append((k, k + 1))
            if r + 1 < rows:
                out.append((k, k + cols))
    return out


@dataclass(frozen=True)
class ModularArchitecture:
    config: ArchitectureConfig
    qpu_graph: QpuGraph
    coupling_edges: frozenset
    comm_qubits: tuple[tuple[int, ...], ...]

    @property
    def num_qpus(self) -> int:
        return self.config.num_qpus

    @property
    def block_size(self) -> int:
        return self.config.block_size

    @property
    def capacity(self) -> int:
        return self.config.block_size

    @property
    def num_ports(self) -> int:
        return self.config.comm_per_qpu

    @property
    def num_physical(self) -> int:
        return self.config.num_qpus * self.config.block_size

    def block(self, q: int) -> range:
        b = self.block_size
        return range(q * b, (q + 1) * b)

    def compute_qubits(self, q: int) -> tuple[int, ...]:
        b = self.block_size
        return tuple(range(q * b, q * b + self.config.compute_per_qpu))


def build_architecture(cfg: ArchitectureConfig, qpu_graph: Optional[QpuGraph] = None) -> ModularArchitecture:
    """Lay out ``N`` identical blocks and wire comm qubits across QPU links.

    Each block's last ``P`` positions are its communication qubits. QPU ``a``
    hands its comm qubits round-robin to its QPU-level neighbours in ascending
    order; each neighbouring pair gets one bidirectional comm-to-comm link.
    """
    if qpu_graph is None:
        topo = dict(cfg.qpu_topology)
        kind = topo.pop("kind", "mesh")
        qpu_graph = build_qpu_graph(kind, cfg.num_qpus, **topo)
    if qpu_graph.num_qpus != cfg.num_qpus:
        raise ArchitectureError(
            f"QPU graph has {qpu_graph.num_qpus} QPUs, configuration has {cfg.num_qpus}")
    n, bsz, c, p = cfg.num_qpus, cfg.block_size, cfg.compute_per_qpu, cfg.comm_per_qpu
    local = _local_edges(cfg.local_topology, bsz, cfg.grid_shape)
    coupling = set()
    for q in range(n):
        off = q * bsz
        for a, b in local:
            coupling.add((off + a, off + b))
            coupling.add((off + b, off + a))
    comm = tuple(tuple(range(q * bsz + c, q * bsz + bsz)) for q in range(n))
    if p > 0:
        nbrs = [qpu_graph.qpu_neighbors(q) for q in range(n)]
        for a in range(n):
            for k, b in enumerate(nbrs[a]):
                if b <= a:
                    continue
                ua = comm[a][k % p]
                ub = comm[b][nbrs[b].index(a) % p]
                coupling.add((ua, ub))
                coupling.add((ub, ua))
    return ModularArchitecture(cfg, qpu_graph, frozenset(coupling), comm)


def qpu_of(arch: ModularArchitecture, p: int) -> int:
    if not 0 <= p < arch.num_physical:
        raise IndexRangeError(f"physical qubit {p} out of range [0, {arch.num_physical})")
    return p // arch.block_size


def local_coupling(arch: ModularArchitecture, q: int) -> frozenset:
    """Directed coupling edges with both endpoints inside QPU ``q``'s block."""
    if not 0 <= q < arch.num_qpus:
        raise IndexRangeError(f"QPU {q} out of range [0, {arch.num_qpus})")
    lo, hi = q * arch.block_size, (q + 1) * arch.block_size
    return frozenset((u, v) for u, v in arch.coupling_edges if lo <= u < hi and lo <= v < hi)
