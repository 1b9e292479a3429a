"""Clifford+T circuits and the line-based ``.qc`` text format.

Format, one statement per line::

    qubits 3          # required first statement
    h 0
    cx 0 1
    tdg 2
    measure 0 1 2     # last statement

``#`` starts a comment. Mnemonics are lowercase.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

SINGLE_QUBIT = ("h", "s", "sdg", "t", "tdg", "x", "y", "z")
GATE_KINDS = SINGLE_QUBIT + ("cx",)


class CircuitParseError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate {self.kind!r}")
        arity = 2 if self.kind == "cx" else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s)")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError("CX qubits must differ")


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    measured: tuple[int, ...] = ()
    name: str = "circuit"

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"qubit {q} out of range for {self.n_qubits} qubits")
        for q in self.measured:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"measured qubit {q} out of range")
        if len(set(self.measured)) != len(self.measured):
            raise ValueError("measured qubits must be distinct")

    def add(self, kind: str, *qubits: int) -> Circuit:
        self.gates.append(Gate(kind, tuple(qubits)))
        return self

    @property
    def t_count(self) -> int:
        return sum(g.kind in ("t", "tdg") for g in self.gates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.n_qubits, self.gates, self.measured) == (
            other.n_qubits,
            other.gates,
            other.measured,
        )


def parse_circuit(text: str, name: str = "circuit") -> Circuit:
    n_qubits: int | None = None
    gates: list[Gate] = []
    measured: tuple[int, ...] | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op, args = parts[0], parts[1:]
        try:
            idx = [int(a) for a in args]
        except ValueError:
            raise CircuitParseError(f"non-integer argument in {line!r}", lineno) from None
        if any(i < 0 for i in idx):
            raise CircuitParseError("negative index", lineno)

        if n_qubits is None:
            if op != "qubits" or len(idx) != 1 or idx[0] < 1:
                raise CircuitParseError("first statement must be 'qubits <n>' with n >= 1", lineno)
            n_qubits = idx[0]
            continue
        if measured is not None:
            raise CircuitParseError("'measure' must be the last statement", lineno)
        if op == "qubits":
            raise CircuitParseError("duplicate 'qubits' statement", lineno)
        if op == "measure":
            if not idx:
                raise CircuitParseError("'measure' needs at least one qubit", lineno)
            if len(set(idx)) != len(idx):
                raise CircuitParseError("measured qubits must be distinct", lineno)
            measured = tuple(idx)
        elif op in SINGLE_QUBIT:
            if len(idx) != 1:
                raise CircuitParseError(f"'{op}' takes one qubit", lineno)
            gates.append(Gate(op, tuple(idx)))
        elif op == "cx":
            if len(idx) != 2:
                raise CircuitParseError("'cx' takes two qubits", lineno)
            if idx[0] == idx[1]:
                raise CircuitParseError("CX qubits must differ", lineno)
            gates.append(Gate(op, tuple(idx)))
        else:
            raise CircuitParseError(f"unknown mnemonic {op!r}", lineno)

        for q in idx:
            if q >= n_qubits:
                raise CircuitParseError(f"qubit {q} out of range (n={n_qubits})", lineno)

    if n_qubits is None:
        raise CircuitParseError("empty circuit: missing 'qubits <n>'")
    if measured is None:
        warnings.warn(f"{name}: no measurement; terminal schedule will be empty", stacklevel=2)
        measured = ()
    return Circuit(n_qubits, gates, measured, name=name)


def render_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits}"]
    lines += [" ".join([g.kind, *map(str, g.qubits)]) for g in c.gates]
    if c.measured:
        lines.append("measure " + " ".join(map(str, c.measured)))
    return "\n".join(lines) + "\n"


def load_circuit(path: str | Path) -> Circuit:
    p = Path(path)
    return parse_circuit(p.read_text(encoding="utf-8"), name=p.stem)
