import random

import pytest
from hypothesis import given, strategies as st

from modumap.architecture import ArchitectureConfig, build_architecture, qpu_of
from modumap.circuit import make_circuit
from modumap.errors import (IncompleteLayoutError, LayoutNotInjectiveError, LayoutOverflowError,
                            LayoutQpuMismatchError, LayoutRangeError)
from modumap.interaction import InteractionGraph
from modumap.layout import apply_layout, assign_layout, external_scores, validate_layout

from helpers import random_graph, random_partition


def arch(n, c, p):
    return build_architecture(ArchitectureConfig(n, c, p))


def test_external_scores():
    g = InteractionGraph(3, {(0, 1): 2.0, (1, 2): 3.0})
    assert external_scores(g, [0, 0, 0]) == [0, 0, 0]
    assert external_scores(InteractionGraph(2, {(0, 1): 2.0}), [0, 1]) == [2, 2]
    assert external_scores(InteractionGraph(3, {(0, 1): 2.0, (0, 2): 3.0}), [0, 1, 1])[0] == 5


def test_single_qpu_lowest_index_takes_comm_slot():
    a = arch(1, 2, 1)
    layout = assign_layout([0, 0, 0], InteractionGraph(3, {}), a)
    assert layout[0] == a.comm_qubits[0][0]
    assert layout[1:] == [0, 1]


def test_top_k_selects_largest_scores():
    # QPU 0 holds qubits 0, 1, 2 with external scores 3, 5, 0
    g = InteractionGraph(5, {(1, 3): 5.0, (0, 4): 3.0})
    a = arch(2, 2, 2)
    layout = assign_layout([0, 0, 0, 1, 1], g, a, "top_k")
    assert set(layout[:2]) == set(a.comm_qubits[0])
    assert layout[1] == a.comm_qubits[0][0] and layout[0] == a.comm_qubits[0][1]
    assert layout[2] == 0


def test_diverse_spreads_over_remote_qpus():
    # a=0 (s=5, QPU 1), b=1 (s=4, QPU 1), c=2 (s=3, QPU 2)
    g = InteractionGraph(6, {(0, 3): 5.0, (1, 4): 4.0, (2, 5): 3.0})
    a = arch(3, 2, 2)
    pi = [0, 0, 0, 1, 1, 2]
    layout = assign_layout(pi, g, a, "diverse")
    assert layout[0] == a.comm_qubits[0][0]
    assert layout[2] == a.comm_qubits[0][1]
    assert layout[1] in a.compute_qubits(0)
    top = assign_layout(pi, g, a, "top_k")
    assert {top[0], top[1]} == set(a.comm_qubits[0])


def test_validate_layout_errors():
    a = arch(2, 2, 1)
    validate_layout([0, 3], [0, 1], a)
    with pytest.raises(LayoutNotInjectiveError):
        validate_layout([0, 0], [0, 0], a)
    with pytest.raises(LayoutQpuMismatchError):
        validate_layout([0, 1], [0, 1], a)
    with pytest.raises(LayoutRangeError):
        validate_layout([0, 6], [0, 1], a)
    with pytest.raises(IncompleteLayoutError):
        validate_layout([0], [0, 1], a)


def test_assign_rejects_overflow_and_bad_qpu():
    a = arch(2, 1, 0)
    with pytest.raises(LayoutOverflowError):
        assign_layout([0, 0], InteractionGraph(2, {}), a)
    with pytest.raises(LayoutQpuMismatchError):
        assign_layout([0, 2], InteractionGraph(2, {}), a)
    with pytest.raises(ValueError):
        assign_layout([0], InteractionGraph(1, {}), a, "spread")


def test_apply_layout_relabels_in_order():
    c = make_circuit(2, [("h", (0,)), ("cx", (0, 1))])
    m = apply_layout(c, [4, 1], 6)
    assert m.num_qubits == 6
    assert [(i.name, i.qubits) for i in m.instructions] == [("h", (4,)), ("cx", (4, 1))]


@given(st.integers(0, 2**32 - 1), st.sampled_from(["top_k", "diverse"]))
def test_layout_properties(seed, mode):
    rng = random.Random(seed)
    n_q, c, p = rng.randint(1, 4), rng.randint(1, 4), rng.randint(0, 3)
    a = arch(n_q, c, p)
    n = rng.randint(1, n_q * (c + p))
    g = random_graph(rng, n)
    pi = random_partition(rng, n, n_q, c + p)
    layout = assign_layout(pi, g, a, mode)
    assert len(set(layout)) == n
    assert all(qpu_of(a, x) == q for x, q in zip(layout, pi))
    s = external_scores(g, pi)
    for q in range(n_q):
        comm = [i for i in range(n) if layout[i] in a.comm_qubits[q]]
        members = [i for i in range(n) if pi[i] == q]
        assert len(comm) == min(p, len(members))
        if mode == "top_k":
            ranked = sorted(members, key=lambda i: (-s[i], i))[:p]
            assert sorted(comm) == sorted(ranked)
