"""Circuit intermediate representation and a minimal OpenQASM 2 reader/writer.

The same :class:`Circuit` type carries logical circuits, mapped physical
circuits and per-QPU local circuits; only the meaning of the qubit indices
changes between stages.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .errors import CircuitError, QasmParseError

BARRIER = "barrier"
MEASURE = "measure"
SWAP = "swap"

# name -> (number of qubit operands, number of parameters)
KNOWN_GATES = {
    "x": (1, 0), "y": (1, 0), "z": (1, 0), "h": (1, 0),
    "s": (1, 0), "sdg": (1, 0), "t": (1, 0), "tdg": (1, 0),
    "rx": (1, 1), "ry": (1, 1), "rz": (1, 1),
    "cx": (2, 0), "cz": (2, 0), "swap": (2, 0), "rzz": (2, 1),
}


@dataclass(frozen=True)
class Instruction:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbits: tuple[int, ...] = ()
    original_index: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "clbits", tuple(int(c) for c in self.clbits))
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.name}: repeated qubit operand in {self.qubits}")

    @property
    def is_barrier(self) -> bool:
        return self.name == BARRIER

    @property
    def is_measure(self) -> bool:
        return self.name == MEASURE

    def remap(self, mapping) -> "Instruction":
        """Return a copy whose qubit operands are passed through ``mapping``."""
        return replace(self, qubits=tuple(mapping[q] for q in self.qubits))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    instructions: tuple[Instruction, ...] = ()
    num_clbits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise CircuitError("register sizes must be nonnegative")
        for k, inst in enumerate(self.instructions):
            for q in inst.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CircuitError(
                        f"instruction {k} ({inst.name}): qubit {q} out of range "
                        f"[0, {self.num_qubits})")
            for c in inst.clbits:
                if not 0 <= c < self.num_clbits:
                    raise CircuitError(
                        f"instruction {k} ({inst.name}): clbit {c} out of range "
                        f"[0, {self.num_clbits})")

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)


def is_two_qubit_op(inst: Instruction) -> bool:
    return len(inst.qubits) == 2 and not inst.is_barrier and not inst.is_measure


def two_qubit_ops(c: Circuit) -> list[tuple[int, tuple[int, int]]]:
    """Two-qubit interactions of ``c`` in order, as ``(index, (lo, hi))``."""
    out = []
    for k, inst in enumerate(c.instructions):
        if is_two_qubit_op(inst):
            a, b = inst.qubits
            out.append((k, (min(a, b), max(a, b))))
    return out


def gate_counts(c: Circuit) -> dict[str, int]:
    """Counts used by the scalar cost model.

    ``n1`` counts single-operand instructions (measurements included),
    ``n_swap`` every instruction named ``swap`` and ``n2`` the remaining
    two-operand instructions. Barriers are free; wider gates land in ``nk``.
    """
    n1 = n2 = n_swap = nk = 0
    for inst in c.instructions:
        if inst.is_barrier:
            continue
        arity = len(inst.qubits)
        if arity == 1:
            n1 += 1
        elif inst.name == SWAP:
            n_swap += 1
        elif arity == 2:
            n2 += 1
        elif arity > 2:
            nk += 1
    return {"n1": n1, "n2": n2, "n_swap": n_swap, "nk": nk}


def circuit_depth(c: Circuit) -> int:
    """ASAP depth. Barriers align their qubits but occupy no layer."""
    ready = [0] * c.num_qubits
    depth = 0
    for inst in c.instructions:
        qs = inst.qubits if inst.qubits else range(c.num_qubits)
        if inst.is_barrier:
            level = max((ready[q] for q in qs), default=0)
            for q in qs:
                ready[q] = level
            continue
        if not inst.qubits:
            continue
        level = max(ready[q] for q in qs) + 1
        for q in qs:
            ready[q] = level
        depth = max(depth, level)
    return depth


# --------------------------------------------------------------------------
# OpenQASM 2 subset

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub,
           ast.Mult: operator.mul, ast.Div: operator.truediv,
           ast.Pow: operator.pow}
_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan,
          "exp": math.exp, "ln": math.log, "sqrt": math.sqrt}

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_RE_VERSION = re.compile(r"OPENQASM\s+\d+(\.\d+)?$")
_RE_INCLUDE = re.compile(r'include\s+"[^"]*"$')
_RE_REG = re.compile(rf"(qreg|creg)\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_RE_MEASURE = re.compile(
    rf"measure\s+({_IDENT})\s*\[\s*(\d+)\s*\]\s*->\s*({_IDENT})\s*\[\s*(\d+)\s*\]$")
_RE_GATE = re.compile(rf"({_IDENT})\s*(?:\((.*)\))?\s*(.*)$", re.S)
_RE_OPERAND = re.compile(rf"({_IDENT})\s*(?:\[\s*(\d+)\s*\])?$")


def _eval_param(text: str, line: int) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise QasmParseError(f"unsupported parameter expression {text!r}", line)

    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError:
        raise QasmParseError(f"malformed parameter expression {text!r}", line) from None
    try:
        value = ev(tree)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise QasmParseError(f"cannot evaluate {text!r}: {exc}", line) from None
    if not math.isfinite(value):
        raise QasmParseError(f"parameter {text!r} is not finite", line)
    return value


def _statements(text: str) -> Iterable[tuple[int, str]]:
    """Yield ``(line, statement)`` pairs with comments stripped."""
    buf: list[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for ch in line:
            if ch == ";":
                stmt = "".join(buf).strip()
                if not stmt:
                    raise QasmParseError("empty statement", lineno)
                yield start, stmt
                buf, start = [], None
            else:
                if start is None and not ch.isspace():
                    start = lineno
                buf.append(ch)
        buf.append(" ")
    if "".join(buf).strip():
        raise QasmParseError("missing ';' at end of input", start)


def parse_qasm(text: str) -> Circuit:
    """Parse the supported OpenQASM 2 subset into a :class:`Circuit`.

    One ``qreg`` and at most one ``creg`` are allowed. Unknown gate names are
    kept verbatim. Raises :class:`QasmParseError` with the offending line.
    """
    qreg = creg = None
    nq = nc = 0
    pending: list[tuple[int, str, tuple, tuple, tuple]] = []

    def qubit_index(tok: str, line: int, allow_register: bool = False):
        m = _RE_OPERAND.match(tok.strip())
        if not m:
            raise QasmParseError(f"bad operand {tok!r}", line)
        name, idx = m.group(1), m.group(2)
        if qreg is None or name != qreg:
            raise QasmParseError(f"unknown quantum register {name!r}", line)
        if idx is None:
            if allow_register:
                return None
            raise QasmParseError("register broadcast is only supported on barrier", line)
        idx = int(idx)
        if idx >= nq:
            raise QasmParseError(f"qubit index {idx} out of range [0, {nq})", line)
        return idx

    for line, stmt in _statements(text):
        if _RE_VERSION.match(stmt) or _RE_INCLUDE.match(stmt):
            continue
        m = _RE_REG.match(stmt)
        if m:
            kind, name, size = m.group(1), m.group(2), int(m.group(3))
            if kind == "qreg":
                if qreg is not None:
                    raise QasmParseError("more than one qreg declared", line)
                qreg, nq = name, size
            else:
                if creg is not None:
                    raise QasmParseError("more than one creg declared", line)
                creg, nc = name, size
            continue
        if stmt.startswith("measure"):
            m = _RE_MEASURE.match(stmt)
            if not m:
                raise QasmParseError(f"malformed measure {stmt!r}", line)
            q = qubit_index(f"{m.group(1)}[{m.group(2)}]", line)
            if creg is None or m.group(3) != creg:
                raise QasmParseError(f"unknown classical register {m.group(3)!r}", line)
            c = int(m.group(4))
            if c >= nc:
                raise QasmParseError(f"clbit index {c} out of range [0, {nc})", line)
            pending.append((line, MEASURE, (q,), (), (c,)))
            continue
        m = _RE_GATE.match(stmt)
        if not m or not m.group(3).strip():
            raise QasmParseError(f"cannot parse statement {stmt!r}", line)
        name, ptext, otext = m.group(1), m.group(2), m.group(3)
        if name in ("gate", "opaque", "if", "reset"):
            raise QasmParseError(f"unsupported statement {name!r}", line)
        params = ()
        if ptext is not None and ptext.strip():
            params = tuple(_eval_param(p, line) for p in ptext.split(","))
        operands = [t for t in otext.split(",")]
        if name == BARRIER:
            idxs = [qubit_index(t, line, allow_register=True) for t in operands]
            qubits = () if any(i is None for i in idxs) else tuple(idxs)
            pending.append((line, BARRIER, qubits, (), ()))
            continue
        qubits = tuple(qubit_index(t, line) for t in operands)
        if name in KNOWN_GATES:
            arity, nparams = KNOWN_GATES[name]
            if len(qubits) != arity:
                raise QasmParseError(f"{name} expects {arity} qubit(s), got {len(qubits)}", line)
            if len(params) != nparams:
                raise QasmParseError(f"{name} expects {nparams} parameter(s), got {len(params)}", line)
        if len(set(qubits)) != len(qubits):
            raise QasmParseError(f"{name}: repeated qubit operand", line)
        pending.append((line, name, qubits, params, ()))

    if qreg is None and pending:
        raise QasmParseError("no qreg declared", pending[0][0])
    instructions = [
        Instruction(name, qubits, params, clbits, original_index=k)
        for k, (_, name, qubits, params, clbits) in enumerate(pending)
    ]
    return Circuit(nq, tuple(instructions), nc)


def _fmt_param(p: float) -> str:
    return repr(float(p))


def to_qasm(c: Circuit, qreg: str = "q", creg: str = "c") -> str:
    """Serialize ``c`` back into the subset accepted by :func:`parse_qasm`."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg {qreg}[{c.num_qubits}];"]
    if c.num_clbits:
        lines.append(f"creg {creg}[{c.num_clbits}];")
    for inst in c.instructions:
        if inst.is_measure:
            lines.append(f"measure {qreg}[{inst.qubits[0]}] -> {creg}[{inst.clbits[0]}];")
            continue
        if inst.is_barrier and not inst.qubits:
            lines.append(f"barrier {qreg};")
            continue
        head = inst.name
        if inst.params:
            head += "(" + ",".join(_fmt_param(p) for p in inst.params) + ")"
        ops = ",".join(f"{qreg}[{q}]" for q in inst.qubits)
        lines.append(f"{head} {ops};")
    return "\n".join(lines) + "\n"


def make_circuit(num_qubits: int, ops: Sequence, num_clbits: int = 0) -> Circuit:
    """Build a circuit from compact tuples ``(name, qubits[, params[, clbits]])``.

    ``original_index`` is set to the position in ``ops``.
    """
    insts = []
    for k, op in enumerate(ops):
        name, qubits, *rest = op
        params = rest[0] if len(rest) > 0 else ()
        clbits = rest[1] if len(rest) > 1 else ()
        insts.append(Instruction(name, tuple(qubits), tuple(params), tuple(clbits), k))
    return Circuit(num_qubits, tuple(insts), num_clbits)
