"""Layer-based schedule estimation with remote-round packing, and the scalar cost model."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .architecture import ModularArchitecture
from .circuit import SWAP, Instruction
from .distributed import DistributedProgram, RemoteEvent
from .errors import ParameterError, SchedulingError
from .network import DistanceTable, QpuGraph, lexicographic_path, path_edges

DEPTH_COEFFICIENT = 0.1


@dataclass(frozen=True)
class CostParams:
    tau_1: float = 1.0
    tau_2: float = 2.0
    tau_swap: float = 6.0
    tau_E: float = 1.0
    tau_C: float = 2.0
    tau_R: float = 0.5
    rho: float = 0.0

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ParameterError(f"{name} must be a finite nonnegative number, got {v!r}")
        if self.rho > 1:
            raise ParameterError(f"rho must lie in [0, 1], got {self.rho}")


@dataclass(frozen=True)
class ScheduleReport:
    makespan: float = 0.0
    num_layers: int = 0
    num_remote_ops: int = 0
    num_rounds: int = 0
    peak_link_utilization: float = 0.0
    peak_port_usage: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Layer:
    locals: dict[int, list[Instruction]] = field(default_factory=dict)
    remotes: list[RemoteEvent] = field(default_factory=list)


@dataclass
class Round:
    events: list[RemoteEvent] = field(default_factory=list)
    cost: float = 0.0
    ports: dict[int, int] = field(default_factory=dict)
    links: dict[tuple[int, int], float] = field(default_factory=dict)
    pairs: set = field(default_factory=set)


def layerize(dp: DistributedProgram) -> list[Layer]:
    """ASAP layering of local instructions and remote events in merged order.

    Resources are physical qubits. Barriers occupy no layer but align their
    qubits (an operand-free barrier aligns the whole block).
    """
    bsz = dp.block_size
    items = []
    for q, local in enumerate(dp.locals):
        for k, inst in enumerate(local.instructions):
            key = inst.original_index if inst.original_index is not None else k
            items.append(((key, 0, q, k), q, inst))
    for k, ev in enumerate(dp.remote_events):
        items.append(((ev.original_index, 1, 0, k), None, ev))
    items.sort(key=lambda t: t[0])

    ready = [0] * (dp.num_qpus * bsz)
    layers: list[Layer] = []
    for _, q, obj in items:
        if q is None:
            res = list(obj.phys_operands)
        else:
            operands = obj.qubits if obj.qubits else range(bsz)
            res = [q * bsz + v for v in operands]
        level = max((ready[r] for r in res), default=0)
        if q is not None and obj.is_barrier:
            for r in res:
                ready[r] = level
            continue
        while len(layers) <= level:
            layers.append(Layer())
        if q is None:
            layers[level].remotes.append(obj)
        else:
            layers[level].locals.setdefault(q, []).append(obj)
        for r in res:
            ready[r] = level + 1
    return layers


def remote_cost(a: int, b: int, dist: DistanceTable, cp: CostParams) -> float:
    d = dist(a, b)
    if d is None:
        raise SchedulingError(f"QPUs {a} and {b} are disconnected")
    return d * cp.tau_E + (1.0 - cp.rho) * cp.tau_C + cp.tau_R


def _event_pairs(ev: RemoteEvent) -> list[tuple[int, int]]:
    # composite events fan out from the first endpoint
    first = ev.endpoint_qpus[0]
    return [(first, b) for b in ev.endpoint_qpus[1:]]


def _event_demand(ev, qg, dist, cp):
    links: dict[tuple[int, int], float] = {}
    cost = 0.0
    for a, b in _event_pairs(ev):
        path = lexicographic_path(qg, a, b)
        if path is None:
            raise SchedulingError(f"remote event {ev.original_index}: QPUs {a} and {b} are disconnected")
        # a link shared by several star paths of one event is charged once
        for e in path_edges(path):
            links[e] = 1.0
        cost = max(cost, remote_cost(a, b, dist, cp))
    pairs = {tuple(sorted(p)) for p in _event_pairs(ev)}
    return links, pairs, cost


def _fits(rnd: Round, ev, links, pairs, qg: QpuGraph, ports: int) -> bool:
    for q in ev.endpoint_qpus:
        if rnd.ports.get(q, 0) + 1 > ports:
            return False
    for e, need in links.items():
        if rnd.links.get(e, 0.0) + need > qg.link_capacity[e]:
            return False
    if qg.switch_pair_limit is not None and len(rnd.pairs | pairs) > qg.switch_pair_limit:
        return False
    return True


def pack_rounds(layer_remotes, qg: QpuGraph, ports: int, cp: CostParams,
                dist: DistanceTable) -> list[Round]:
    """Next-fit packing of remote events (in original order) into rounds."""
    rounds: list[Round] = []
    for ev in sorted(layer_remotes, key=lambda e: e.original_index):
        links, pairs, cost = _event_demand(ev, qg, dist, cp)
        if not _fits(Round(), ev, links, pairs, qg, ports):
            raise SchedulingError(
                f"remote event {ev.original_index} on QPUs {ev.endpoint_qpus} cannot fit an empty round "
                f"(ports={ports}, path capacity or pair limit too small)")
        if not rounds or not _fits(rounds[-1], ev, links, pairs, qg, ports):
            rounds.append(Round())
        rnd = rounds[-1]
        rnd.events.append(ev)
        rnd.cost = max(rnd.cost, cost)
        for q in ev.endpoint_qpus:
            rnd.ports[q] = rnd.ports.get(q, 0) + 1
        for e, need in links.items():
            rnd.links[e] = rnd.links.get(e, 0.0) + need
        rnd.pairs |= pairs
    if qg.is_switched:
        for rnd in rounds[1:]:
            rnd.cost += qg.switch_reconfig_delay
    return rounds


def instruction_cost(inst: Instruction, cp: CostParams) -> float:
    if inst.is_barrier:
        return 0.0
    if inst.name == SWAP:
        return cp.tau_swap
    if len(inst.qubits) == 1:
        return cp.tau_1
    return cp.tau_2


def estimate_schedule(dp: DistributedProgram, arch: ModularArchitecture, qg: QpuGraph,
                      dist: DistanceTable, cp: CostParams) -> ScheduleReport:
    layers = layerize(dp)
    makespan = 0.0
    n_rounds = 0
    peak_link = 0.0
    peak_port = 0
    for layer in layers:
        local = max((sum(instruction_cost(i, cp) for i in insts)
                     for insts in layer.locals.values()), default=0.0)
        rounds = pack_rounds(layer.remotes, qg, arch.num_ports, cp, dist)
        n_rounds += len(rounds)
        for rnd in rounds:
            for e, used in rnd.links.items():
                peak_link = max(peak_link, used / qg.link_capacity[e])
            peak_port = max(peak_port, max(rnd.ports.values(), default=0))
        makespan += max(local, sum(r.cost for r in rounds))
    return ScheduleReport(makespan, len(layers), len(dp.remote_events), n_rounds,
                          peak_link, peak_port)


def scalar_cost(n1: int, n2: int, n_swap: int, n_remote: int, depth: int,
                cp: CostParams) -> dict[str, float]:
    c_local = cp.tau_1 * n1 + cp.tau_2 * n2 + cp.tau_swap * n_swap
    c_remote = n_remote * (cp.tau_E + cp.tau_C + cp.tau_R)
    return {
        "C_local": c_local,
        "C_remote": c_remote,
        "C_total": c_local + c_remote + DEPTH_COEFFICIENT * depth * cp.tau_2,
        "depth_coefficient": DEPTH_COEFFICIENT,
    }
