"""Communication-port-aware placement of logical qubits onto physical qubits."""

from __future__ import annotations

from typing import Sequence

from .architecture import ModularArchitecture
from .circuit import Circuit
from .errors import (IncompleteLayoutError, IndexRangeError, LayoutNotInjectiveError,
                     LayoutOverflowError, LayoutQpuMismatchError, LayoutRangeError)
from .interaction import InteractionGraph

LAYOUT_MODES = ("top_k", "diverse")


def external_scores(g: InteractionGraph, pi: Sequence[int]) -> list[float]:
    """Interaction weight each qubit has with qubits on other QPUs."""
    if len(pi) != g.num_qubits:
        raise IndexRangeError(f"partition has length {len(pi)}, expected {g.num_qubits}")
    s = [0.0] * g.num_qubits
    for (i, j), w in g.weights.items():
        if pi[i] != pi[j]:
            s[i] += w
            s[j] += w
    return s


def _remote_contacts(g: InteractionGraph, pi: Sequence[int]) -> list[set]:
    contacts = [set() for _ in range(g.num_qubits)]
    for (i, j), w in g.weights.items():
        if w > 0 and pi[i] != pi[j]:
            contacts[i].add(pi[j])
            contacts[j].add(pi[i])
    return contacts


def _select_top_k(members, scores, k):
    return sorted(members, key=lambda i: (-scores[i], i))[:k]


def _select_diverse(members, scores, contacts, k):
    # each pick scores s_i plus max(remaining s) per remote QPU not yet covered
    chosen = []
    covered = set()
    remaining = list(members)
    while remaining and len(chosen) < k:
        bonus = max(scores[i] for i in remaining)
        best = max(remaining,
                   key=lambda i: (scores[i] + bonus * len(contacts[i] - covered), -i))
        chosen.append(best)
        covered |= contacts[best]
        remaining.remove(best)
    return chosen


def assign_layout(pi: Sequence[int], g: InteractionGraph, arch: ModularArchitecture,
                  mode: str = "top_k") -> list[int]:
    """Map each logical qubit to a physical qubit of its QPU.

    Up to ``P`` qubits per QPU take the communication positions (highest
    external score first, or spread over distinct remote QPUs in ``diverse``
    mode); the rest fill compute positions in ascending logical order.
    """
    if mode not in LAYOUT_MODES:
        raise ValueError(f"unknown layout mode {mode!r}; expected one of {LAYOUT_MODES}")
    n_q, cap, ports = arch.num_qpus, arch.capacity, arch.num_ports
    if len(pi) != g.num_qubits:
        raise IncompleteLayoutError(f"partition has length {len(pi)}, expected {g.num_qubits}")
    members: list[list[int]] = [[] for _ in range(n_q)]
    for i, q in enumerate(pi):
        if not 0 <= q < n_q:
            raise LayoutQpuMismatchError(f"qubit {i} assigned to nonexistent QPU {q}")
        members[q].append(i)
    scores = external_scores(g, pi)
    contacts = _remote_contacts(g, pi) if mode == "diverse" else None
    phys = [-1] * g.num_qubits
    for q in range(n_q):
        if len(members[q]) > cap:
            raise LayoutOverflowError(f"QPU {q} receives {len(members[q])} qubits, capacity {cap}")
        if mode == "top_k":
            chosen = _select_top_k(members[q], scores, ports)
        else:
            chosen = _select_diverse(members[q], scores, contacts, ports)
        for slot, i in zip(arch.comm_qubits[q], chosen):
            phys[i] = slot
        picked = set(chosen)
        rest = [i for i in members[q] if i not in picked]
        for slot, i in zip(arch.compute_qubits(q), rest):
            phys[i] = slot
    if any(p < 0 for p in phys):
        raise IncompleteLayoutError("some logical qubits were left unplaced")
    validate_layout(phys, pi, arch)
    return phys


def validate_layout(layout: Sequence[int], pi: Sequence[int], arch: ModularArchitecture) -> None:
    if len(layout) != len(pi):
        raise IncompleteLayoutError(f"layout covers {len(layout)} qubits, partition has {len(pi)}")
    for i, p in enumerate(layout):
        if not 0 <= p < arch.num_physical:
            raise LayoutRangeError(f"qubit {i} mapped to invalid physical index {p}")
    if len(set(layout)) != len(layout):
        raise LayoutNotInjectiveError("layout is not injective")
    for i, p in enumerate(layout):
        if p // arch.block_size != pi[i]:
            raise LayoutQpuMismatchError(
                f"QPU mismatch: qubit {i} placed on QPU {p // arch.block_size}, partition says {pi[i]}")


def apply_layout(c: Circuit, layout: Sequence[int], num_physical: int) -> Circuit:
    """Relabel logical operands to physical indices without reordering."""
    return Circuit(num_physical, tuple(inst.remap(layout) for inst in c.instructions), c.num_clbits)
