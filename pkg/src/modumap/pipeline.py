"""End-to-end compilation in global or distributed mode."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .architecture import ModularArchitecture
from .circuit import Circuit, Instruction, circuit_depth, gate_counts
from .config import RunConfig
from .distributed import DistributedProgram, extract_distributed, route_locals
from .errors import ModumapError, PipelineError, ValidationError
from .interaction import InteractionGraph, extract_weights
from .layout import apply_layout, assign_layout
from .network import QpuGraph, all_pairs_distances, route_traffic, traffic_matrix
from .partition import (ObjectiveTerms, check_capacity, objective, run_partitioner,
                        validate_partition_inputs, _check_assign)
from .routing import route, verify_routed
from .scheduler import ScheduleReport, estimate_schedule, scalar_cost

MODES = ("global", "distributed")
FLOAT_DIGITS = 12


@dataclass
class CompilationReport:
    mode: str
    num_qubits: int
    partition: list[int]
    layout: list[int]
    objective: ObjectiveTerms
    traffic_matrix: list[list[float]]
    link_loads: list[tuple[int, int, float]]
    swap_counts: list[int]
    remote_events: list[dict]
    schedule: Optional[ScheduleReport]
    gate_counts: dict[str, int]
    depth: int
    costs: dict[str, float]
    circuits: list[list[dict]]
    parameters: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def n_remote(self) -> int:
        return len(self.remote_events)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "num_qubits": self.num_qubits,
            "partition": list(self.partition),
            "layout": list(self.layout),
            "objective": self.objective.as_dict(),
            "traffic_matrix": self.traffic_matrix,
            "link_loads": [list(t) for t in self.link_loads],
            "swap_counts": list(self.swap_counts),
            "n_swap": sum(self.swap_counts),
            "n_remote": self.n_remote,
            "remote_events": self.remote_events,
            "schedule": None if self.schedule is None else self.schedule.as_dict(),
            "gate_counts": dict(self.gate_counts),
            "depth": self.depth,
            "costs": dict(self.costs),
            "circuits": self.circuits,
            "parameters": self.parameters,
            "seed": self.seed,
        }


def _canonical(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x} cannot be serialized")
        x = float(f"{x:.{FLOAT_DIGITS}g}")
        return 0.0 if x == 0 else x
    return obj


def to_canonical_json(obj: Any) -> str:
    """Sorted keys, floats rounded to 12 significant digits, trailing newline."""
    return json.dumps(_canonical(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def instruction_listing(inst: Instruction) -> dict:
    out = {"name": inst.name, "qubits": list(inst.qubits)}
    if inst.params:
        out["params"] = list(inst.params)
    if inst.clbits:
        out["clbits"] = list(inst.clbits)
    return out


class _Stage:
    """Context manager that re-raises package errors tagged with a stage name."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, ModumapError) and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


@dataclass
class _Front:
    g: InteractionGraph
    arch: ModularArchitecture
    qg: QpuGraph
    pi: list[int]
    terms: ObjectiveTerms
    tm: list[list[float]]
    loads: list[tuple[int, int, float]]
    layout: list[int]
    mapped: Circuit


def partition_stage(c: Circuit, cfg: RunConfig, arch: Optional[ModularArchitecture] = None):
    """Weights, partition and objective. Returns ``(graph, arch, partition, terms)``."""
    with _Stage("architecture"):
        arch = cfg.build_architecture() if arch is None else arch
    qg = arch.qpu_graph
    dist = all_pairs_distances(qg)
    p = cfg.partitioner
    with _Stage("weights"):
        g = extract_weights(c, cfg.cost.gamma)
        validate_partition_inputs(g, arch.num_qpus, arch.capacity)
    with _Stage("partition"):
        if p.forced_partition is not None:
            pi = list(p.forced_partition)
            _check_assign(pi, g.num_qubits, arch.num_qpus)
        else:
            pi = run_partitioner(p.algorithm, g, qg, dist, arch.num_qpus, arch.capacity,
                                 arch.num_ports, cfg.objective_params(), p.lam, p.seed,
                                 p.pass_limit, cfg.sa_params())
        check_capacity(pi, arch.num_qpus, arch.capacity)
    with _Stage("objective"):
        terms = objective(g, pi, qg, dist, arch.num_ports, cfg.objective_params())
    return g, arch, pi, terms


def _front(c: Circuit, cfg: RunConfig, arch: Optional[ModularArchitecture]) -> _Front:
    g, arch, pi, terms = partition_stage(c, cfg, arch)
    qg = arch.qpu_graph
    with _Stage("objective"):
        tm = traffic_matrix(g, pi, arch.num_qpus)
        loads, _ = route_traffic(qg, tm, cfg.partitioner.routing_mode)
    with _Stage("layout"):
        layout = assign_layout(pi, g, arch, cfg.layout.mode)
        mapped = apply_layout(c, layout, arch.num_physical)
    return _Front(g, arch, qg, pi, terms, tm.t.tolist(),
                  [(u, v, loads.load[(u, v)]) for u, v in qg.edges], layout, mapped)


def _report(mode, c, cfg, f: _Front, swaps, events, schedule, counts, depth, costs, circuits):
    return CompilationReport(
        mode=mode, num_qubits=c.num_qubits, partition=list(f.pi), layout=list(f.layout),
        objective=f.terms, traffic_matrix=f.tm, link_loads=f.loads, swap_counts=list(swaps),
        remote_events=events, schedule=schedule, gate_counts=counts, depth=depth, costs=costs,
        circuits=circuits, parameters=cfg.to_dict(), seed=cfg.partitioner.seed,
    )


def compile_global(c: Circuit, cfg: RunConfig,
                   arch: Optional[ModularArchitecture] = None) -> CompilationReport:
    """Route the laid-out circuit over the full coupling map; no remote events."""
    f = _front(c, cfg, arch)
    with _Stage("routing"):
        rc = route(f.mapped, f.arch.coupling_edges)
        verify_routed(rc, f.arch.coupling_edges)
    counts = gate_counts(rc.circuit)
    depth = circuit_depth(rc.circuit)
    costs = scalar_cost(counts["n1"], counts["n2"], counts["n_swap"], 0, depth, cfg.cost_params())
    report = _report("global", c, cfg, f, [rc.swap_count], [], None, counts, depth, costs,
                     [[instruction_listing(i) for i in rc.circuit.instructions]])
    with _Stage("consistency"):
        check_report(report, f.g, f.arch, cfg)
    return report


def compile_distributed(c: Circuit, cfg: RunConfig,
                        arch: Optional[ModularArchitecture] = None) -> CompilationReport:
    f = _front(c, cfg, arch)
    with _Stage("extraction"):
        dp = extract_distributed(f.mapped, f.arch)
    with _Stage("local_routing"):
        dp = route_locals(dp, f.arch)
    with _Stage("schedule"):
        sched = estimate_schedule(dp, f.arch, f.qg, all_pairs_distances(f.qg), cfg.cost_params())
    counts = _local_counts(dp)
    # depth of the distributed program: its layer count, remote events included
    depth = sched.num_layers
    costs = scalar_cost(counts["n1"], counts["n2"], counts["n_swap"], len(dp.remote_events),
                        depth, cfg.cost_params())
    report = _report("distributed", c, cfg, f, dp.swap_counts,
                     [ev.as_dict() for ev in dp.remote_events], sched, counts, depth, costs,
                     [[instruction_listing(i) for i in local.instructions] for local in dp.locals])
    with _Stage("consistency"):
        check_report(report, f.g, f.arch, cfg, f.mapped)
    return report


def _local_counts(dp: DistributedProgram) -> dict[str, int]:
    total = {"n1": 0, "n2": 0, "n_swap": 0, "nk": 0}
    for local in dp.locals:
        for k, v in gate_counts(local).items():
            total[k] += v
    return total


def compile_circuit(c: Circuit, cfg: RunConfig, mode: str = "distributed") -> CompilationReport:
    if mode == "global":
        return compile_global(c, cfg)
    if mode == "distributed":
        return compile_distributed(c, cfg)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def _cross_qpu_instructions(mapped: Circuit, block_size: int) -> int:
    return sum(1 for inst in mapped.instructions
               if not inst.is_barrier and len({p // block_size for p in inst.qubits}) > 1)


def check_report(report: CompilationReport, g: InteractionGraph, arch: ModularArchitecture,
                 cfg: RunConfig, mapped: Optional[Circuit] = None) -> None:
    """Closed-loop checks: recomputed objective, remote counts and swap totals."""
    def fail(msg):
        raise ValidationError(f"report inconsistency: {msg}")

    qg = arch.qpu_graph
    again = objective(g, report.partition, qg, all_pairs_distances(qg), arch.num_ports,
                      cfg.objective_params())
    if again != report.objective:
        fail("objective terms do not recompute from the partition")
    if report.costs["C_remote"] != scalar_cost(0, 0, 0, report.n_remote, 0, cfg.cost_params())["C_remote"]:
        fail("C_remote does not match n_remote")
    if report.gate_counts["n_swap"] < sum(report.swap_counts):
        fail("fewer swaps in the routed circuits than the router reported")
    if report.mode == "global":
        if report.n_remote != 0 or report.schedule is not None:
            fail("global mode must not carry remote events or a schedule")
    else:
        if report.schedule.num_remote_ops != report.n_remote:
            fail("schedule remote count differs from the remote-event table")
        if mapped is not None and _cross_qpu_instructions(mapped, arch.block_size) != report.n_remote:
            fail("remote-event count differs from cross-QPU instructions under the layout")
