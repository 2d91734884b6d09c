"""Split a mapped circuit into per-QPU local circuits and ordered remote events."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .architecture import ModularArchitecture, local_coupling
from .circuit import BARRIER, Circuit, Instruction
from .errors import ExtractionError
from .routing import route


@dataclass(frozen=True)
class RemoteEvent:
    name: str
    phys_operands: tuple[int, ...]
    endpoint_qpus: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbits: tuple[int, ...] = ()
    original_index: int = 0
    composite: bool = False

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "phys_operands": list(self.phys_operands),
            "endpoint_qpus": list(self.endpoint_qpus),
            "params": list(self.params),
            "clbits": list(self.clbits),
            "original_index": self.original_index,
            "composite": self.composite,
        }


@dataclass(frozen=True)
class DistributedProgram:
    """Local circuits use block-local indices ``0 .. B-1``; remote events use
    global physical indices."""

    locals: tuple[Circuit, ...]
    remote_events: tuple[RemoteEvent, ...]
    block_size: int
    swap_counts: tuple[int, ...] = ()

    @property
    def num_qpus(self) -> int:
        return len(self.locals)

    @property
    def qubit_index_maps(self) -> list[dict[int, int]]:
        b = self.block_size
        return [{q * b + k: k for k in range(b)} for q in range(self.num_qpus)]

    def to_physical(self, q: int, local_index: int) -> int:
        return q * self.block_size + local_index


def extract_distributed(mapped: Circuit, arch: ModularArchitecture) -> DistributedProgram:
    """Scan ``mapped`` in order, keeping same-QPU instructions local and
    recording cross-QPU ones as remote events with a synchronising barrier on
    every endpoint QPU."""
    n_q, bsz = arch.num_qpus, arch.block_size
    locals_: list[list[Instruction]] = [[] for _ in range(n_q)]
    events: list[RemoteEvent] = []
    for k, inst in enumerate(mapped.instructions):
        for p in inst.qubits:
            if not 0 <= p < arch.num_physical:
                raise ExtractionError(
                    f"instruction {k} ({inst.name}): operand {p} outside [0, {arch.num_physical})")
        if not inst.qubits:
            for q in range(n_q):
                locals_[q].append(replace(inst, original_index=k))
            continue
        owners: list[int] = []
        for p in inst.qubits:
            if p // bsz not in owners:
                owners.append(p // bsz)
        if inst.is_barrier:
            for q in owners:
                sub = tuple(p - q * bsz for p in inst.qubits if p // bsz == q)
                locals_[q].append(Instruction(BARRIER, sub, original_index=k))
            continue
        if len(owners) == 1:
            q = owners[0]
            locals_[q].append(replace(inst, qubits=tuple(p - q * bsz for p in inst.qubits),
                                      original_index=k))
            continue
        events.append(RemoteEvent(inst.name, inst.qubits, tuple(owners), inst.params,
                                  inst.clbits, k, composite=len(inst.qubits) > 2))
        for q in owners:
            locals_[q].append(Instruction(BARRIER, (), original_index=k))
    circuits = tuple(Circuit(bsz, tuple(insts), mapped.num_clbits) for insts in locals_)
    return DistributedProgram(circuits, tuple(events), bsz, (0,) * n_q)


def route_locals(dp: DistributedProgram, arch: ModularArchitecture) -> DistributedProgram:
    """Route each local circuit on its own block and re-resolve remote
    operands to where their qubits sit at the synchronising barrier."""
    bsz = dp.block_size
    routed_locals = []
    swap_counts = []
    # per QPU: original_index of a sync barrier -> placement at that barrier
    placements: list[dict[int, tuple[int, ...]]] = []
    for q, local in enumerate(dp.locals):
        off = q * bsz
        coupling = [(u - off, v - off) for u, v in local_coupling(arch, q)]
        rc = route(local, coupling)
        routed_locals.append(rc.circuit)
        swap_counts.append(rc.swap_count)
        placements.append({local.instructions[j].original_index: snap
                           for j, snap in rc.snapshots.items()})
    events = []
    for ev in dp.remote_events:
        ops = []
        for p in ev.phys_operands:
            q = p // bsz
            snap = placements[q].get(ev.original_index)
            ops.append(p if snap is None else q * bsz + snap[p - q * bsz])
        events.append(replace(ev, phys_operands=tuple(ops)))
    return DistributedProgram(tuple(routed_locals), tuple(events), bsz, tuple(swap_counts))


def remote_count(dp: DistributedProgram) -> int:
    return len(dp.remote_events)
