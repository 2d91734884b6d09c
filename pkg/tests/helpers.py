"""Random instance generators shared by the tests."""

import random

from modumap.circuit import Circuit, Instruction, make_circuit
from modumap.interaction import InteractionGraph

ONE_QUBIT = ("h", "x", "z", "s", "t")
TWO_QUBIT = ("cx", "cz", "swap")


def random_graph(rng: random.Random, n: int, max_edges: int | None = None,
                 integer: bool = False) -> InteractionGraph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    m = rng.randint(0, len(pairs) if max_edges is None else min(max_edges, len(pairs)))
    weights = {}
    for p in pairs[:m]:
        weights[p] = float(rng.randint(1, 9)) if integer else rng.uniform(0.1, 5.0)
    return InteractionGraph(n, weights, 1.0)


def random_circuit(rng: random.Random, n: int, length: int, barriers: bool = True,
                   measures: bool = False, wide: bool = False,
                   gates2=TWO_QUBIT) -> Circuit:
    ops = []
    for _ in range(length):
        r = rng.random()
        if n >= 2 and r < 0.5:
            a, b = rng.sample(range(n), 2)
            ops.append((rng.choice(gates2), (a, b)))
        elif barriers and r < 0.58:
            if rng.random() < 0.5:
                ops.append(("barrier", ()))
            else:
                ops.append(("barrier", tuple(rng.sample(range(n), rng.randint(1, n)))))
        elif wide and n >= 3 and r < 0.64:
            ops.append(("ccx", tuple(rng.sample(range(n), 3))))
        elif measures and r < 0.7:
            q = rng.randrange(n)
            ops.append(("measure", (q,), (), (q,)))
        else:
            ops.append((rng.choice(ONE_QUBIT), (rng.randrange(n),)))
    return make_circuit(n, ops, n if measures else 0)


def random_partition(rng: random.Random, n: int, num_qpus: int, capacity: int) -> list[int]:
    slots = [q for q in range(num_qpus) for _ in range(capacity)]
    rng.shuffle(slots)
    return slots[:n]


def instr(name, *qubits, **kw):
    return Instruction(name, tuple(qubits), **kw)
