"""Clifford+T -> Pauli-based computation.

Every gate becomes Pauli rotations. Clifford rotations are pushed to the end
of the circuit, rewriting each pi/8 rotation they pass, and finally absorbed
into the terminal Z measurements. What remains is an ordered list of
``+-pi/8`` rotations plus a list of signed Pauli measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import Circuit, Gate
from .pauli import PauliRotation, PauliString, commutes, conjugate, multiply


def gate_to_rotations(g: Gate, n: int) -> list[PauliRotation]:
    """Decompose a gate into rotations, listed in time order."""

    def rot(letters: dict[int, str], eighths: int) -> PauliRotation:
        return PauliRotation(PauliString.from_letters(letters, n), eighths)

    q = g.qubits[0]
    if g.kind == "h":
        return [rot({q: "Z"}, 2), rot({q: "X"}, 2), rot({q: "Z"}, 2)]
    if g.kind == "s":
        return [rot({q: "Z"}, 2)]
    if g.kind == "sdg":
        return [rot({q: "Z"}, -2)]
    if g.kind == "t":
        return [rot({q: "Z"}, 1)]
    if g.kind == "tdg":
        return [rot({q: "Z"}, -1)]
    if g.kind in ("x", "y", "z"):
        return [rot({q: g.kind.upper()}, 4)]
    if g.kind == "cx":
        c, t = g.qubits
        return [rot({c: "Z", t: "X"}, 2), rot({c: "Z"}, -2), rot({t: "X"}, -2)]
    raise ValueError(f"unknown gate {g.kind!r}")


class CliffordFrame:
    """Clifford unitary ``F`` kept as the images ``F^dag X_j F`` and ``F^dag Z_j F``.

    ``append(C)`` means ``C`` acts after everything already in the frame.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.img_x = [PauliString.single(n, j, "X") for j in range(n)]
        self.img_z = [PauliString.single(n, j, "Z") for j in range(n)]
        self.rotations: list[PauliRotation] = []

    def pull_back(self, p: PauliString) -> PauliString:
        """Return ``F^dag p F``."""
        out = PauliString(self.n, 0, 0, p.phase)
        for q in p.qubits():
            letter = p.letter(q)
            if letter == "X":
                out = multiply(out, self.img_x[q])
            elif letter == "Z":
                out = multiply(out, self.img_z[q])
            else:
                y = multiply(self.img_x[q], self.img_z[q])
                out = multiply(out, PauliString(self.n, y.x, y.z, y.phase + 1))
        return out

    def append(self, c: PauliRotation) -> None:
        if not c.is_clifford:
            raise ValueError("only Clifford rotations enter the frame")
        new_x, new_z = list(self.img_x), list(self.img_z)
        for j in c.operator.qubits():
            for images, letter in ((new_x, "X"), (new_z, "Z")):
                gen = PauliString.single(self.n, j, letter)
                moved = conjugate(c, gen)
                if moved != gen:
                    images[j] = self.pull_back(moved)
        self.img_x, self.img_z = new_x, new_z
        self.rotations.append(c)


@dataclass
class PbcProgram:
    n_qubits: int
    rotations: list[PauliRotation] = field(default_factory=list)
    layers: list[list[int]] = field(default_factory=list)
    measurements: list[PauliString] = field(default_factory=list)
    measured_qubits: tuple[int, ...] = ()
    name: str = "program"

    @property
    def stats(self) -> dict[str, float]:
        return stats(self)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n_qubits": self.n_qubits,
            "rotations": [
                {"pauli": r.operator.letters(), "angle": r.angle_label} for r in self.rotations
            ],
            "layers": [list(layer) for layer in self.layers],
            "measurements": [str(m) for m in self.measurements],
            "measured_qubits": list(self.measured_qubits),
            "stats": self.stats,
        }

    @classmethod
    def from_json(cls, data: dict) -> PbcProgram:
        eighths = {"+pi/8": 1, "-pi/8": -1}
        rotations = [
            PauliRotation(PauliString.parse(r["pauli"]), eighths[r["angle"]])
            for r in data["rotations"]
        ]
        return cls(
            n_qubits=data["n_qubits"],
            rotations=rotations,
            layers=[list(layer) for layer in data["layers"]],
            measurements=[PauliString.parse(m) for m in data["measurements"]],
            measured_qubits=tuple(data.get("measured_qubits", ())),
            name=data.get("name", "program"),
        )


def transpile(c: Circuit) -> PbcProgram:
    frame = CliffordFrame(c.n_qubits)
    rotations: list[PauliRotation] = []
    for g in c.gates:
        for r in gate_to_rotations(g, c.n_qubits):
            if r.is_clifford:
                frame.append(r)
            else:
                rotations.append(PauliRotation(frame.pull_back(r.operator), r.eighths))
    measurements = [
        frame.pull_back(PauliString.single(c.n_qubits, q, "Z")) for q in c.measured
    ]
    program = PbcProgram(
        c.n_qubits, rotations, [], measurements, tuple(c.measured), name=c.name
    )
    return layerize(program)


def layerize(p: PbcProgram) -> PbcProgram:
    """Greedy commuting layers.

    Each rotation lands right after the last layer holding a rotation it
    anticommutes with; every later layer only holds rotations it commutes
    with, so that layer is the earliest legal choice.
    """
    layers: list[list[int]] = []
    for i, r in enumerate(p.rotations):
        frontier = 0
        for li in range(len(layers) - 1, -1, -1):
            if any(not commutes(r.operator, p.rotations[j].operator) for j in layers[li]):
                frontier = li + 1
                break
        if frontier == len(layers):
            layers.append([i])
        else:
            layers[frontier].append(i)
    return PbcProgram(
        p.n_qubits, list(p.rotations), layers, list(p.measurements), p.measured_qubits, p.name
    )


def weight_stats(weights: list[int]) -> dict[str, float]:
    if not weights:
        return {"t_count": 0, "weight_min": 0, "weight_avg": 0.0, "weight_max": 0, "weight_std": 0.0}
    k = len(weights)
    avg = sum(weights) / k
    var = sum((w - avg) ** 2 for w in weights) / k
    return {
        "t_count": k,
        "weight_min": min(weights),
        "weight_avg": avg,
        "weight_max": max(weights),
        "weight_std": math.sqrt(var),
    }


def stats(p: PbcProgram) -> dict[str, float]:
    return weight_stats([r.operator.weight for r in p.rotations])
