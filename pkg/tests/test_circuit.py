import math
import random

import pytest
from hypothesis import given, strategies as st

from modumap.circuit import (Circuit, Instruction, circuit_depth, gate_counts, make_circuit,
                             parse_qasm, to_qasm, two_qubit_ops)
from modumap.errors import CircuitError, QasmParseError

from helpers import random_circuit


def test_parse_single_cx():
    c = parse_qasm("qreg q[2]; cx q[0],q[1];")
    assert c.num_qubits == 2
    assert len(c.instructions) == 1
    assert c.instructions[0].name == "cx"
    assert c.instructions[0].qubits == (0, 1)


def test_parse_parametrised_rotation():
    c = parse_qasm("qreg q[1]; rz(0.5) q[0];")
    assert c.num_qubits == 1
    assert c.instructions[0].name == "rz"
    assert c.instructions[0].params == (0.5,)


def test_parse_index_out_of_range():
    with pytest.raises(QasmParseError, match="out of range"):
        parse_qasm("qreg q[2]; cx q[0],q[2];")


def test_parse_full_header_and_measure():
    text = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
creg c[3];
h q[0];   // comment
rx(pi/2) q[1];
barrier q;
barrier q[0], q[2];
measure q[2] -> c[1];
"""
    c = parse_qasm(text)
    names = [i.name for i in c.instructions]
    assert names == ["h", "rx", "barrier", "barrier", "measure"]
    assert c.instructions[1].params == (math.pi / 2,)
    assert c.instructions[2].qubits == ()
    assert c.instructions[3].qubits == (0, 2)
    assert c.instructions[4].clbits == (1,)
    assert [i.original_index for i in c.instructions] == list(range(5))


def test_parse_unknown_gate_kept_verbatim():
    c = parse_qasm("qreg q[3]; foo q[0], q[1]; bar(1.5) q[2]; ccx q[0],q[1],q[2];")
    assert [(i.name, i.qubits) for i in c.instructions] == [
        ("foo", (0, 1)), ("bar", (2,)), ("ccx", (0, 1, 2))]


@pytest.mark.parametrize("text,line", [
    ("qreg q[2];\ncx q[0];", 2),
    ("qreg q[2];\nqreg r[2];", 2),
    ("qreg q[1];\ncreg c[1];\ncreg d[1];", 3),
    ("qreg q[2];\n\nh q[0]\n", 3),
    ("qreg q[2];\ncx q[0],q[0];", 2),
    ("qreg q[2];\nrz(foo) q[0];", 2),
    ("qreg q[2];\nh r[0];", 2),
    ("qreg q[1];\ncreg c[1];\nmeasure q[0] -> c[4];", 3),
    ("qreg q[1];\ngate g a { h a; }", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(QasmParseError) as info:
        parse_qasm(text)
    assert info.value.line == line


def test_two_qubit_ops_examples():
    c = make_circuit(2, [("h", (0,)), ("cx", (0, 1)), ("barrier", ()), ("cx", (1, 0))])
    assert two_qubit_ops(c) == [(1, (0, 1)), (3, (0, 1))]
    assert two_qubit_ops(Circuit(0)) == []
    assert two_qubit_ops(make_circuit(3, [("swap", (2, 1))])) == [(0, (1, 2))]


def test_two_qubit_ops_skip_two_operand_barrier():
    c = make_circuit(2, [("barrier", (0, 1)), ("cz", (0, 1))])
    assert two_qubit_ops(c) == [(1, (0, 1))]


def test_instruction_invariants():
    with pytest.raises(CircuitError):
        Instruction("cx", (1, 1))
    with pytest.raises(CircuitError):
        Circuit(2, (Instruction("h", (2,)),))
    with pytest.raises(CircuitError):
        Circuit(1, (Instruction("measure", (0,), clbits=(0,)),), num_clbits=0)


def test_gate_counts_and_depth():
    c = make_circuit(3, [("h", (0,)), ("cx", (0, 1)), ("swap", (1, 2)), ("h", (2,)),
                         ("barrier", ()), ("ccx", (0, 1, 2))])
    assert gate_counts(c) == {"n1": 2, "n2": 1, "n_swap": 1, "nk": 1}
    assert circuit_depth(c) == 5
    assert circuit_depth(make_circuit(2, [("h", (0,)), ("h", (1,))])) == 1


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 30))
def test_round_trip(seed, n, length):
    rng = random.Random(seed)
    c = random_circuit(rng, n, length, measures=True, wide=True)
    # append a parametrised gate with an awkward value
    c = Circuit(c.num_qubits, c.instructions + (Instruction("rz", (0,), (rng.uniform(-7, 7),),
                                                            original_index=len(c)),),
                c.num_clbits)
    again = parse_qasm(to_qasm(c))
    assert again == c


@given(st.integers(0, 2**32 - 1))
def test_two_qubit_ops_order_and_exclusions(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, 4, 25, measures=True)
    ops = two_qubit_ops(c)
    idx = [k for k, _ in ops]
    assert idx == sorted(idx)
    for k, (a, b) in ops:
        inst = c.instructions[k]
        assert a < b and not inst.is_barrier and not inst.is_measure
    expected = sum(1 for i in c.instructions if len(i.qubits) == 2 and i.name != "barrier")
    assert len(ops) == expected
