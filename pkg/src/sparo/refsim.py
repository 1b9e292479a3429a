"""Dense state-vector oracle for checking transpilation.

Basis index bit ``q`` is qubit ``q``. Only meant for small registers (the
PBC runner needs one extra ancilla qubit).
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit
from .pauli import PauliRotation, PauliString
from .transpile import PbcProgram

MAX_QUBITS = 10
NORM_TOL = 1e-10

_SQ = 1 / math.sqrt(2)
GATE_MATRICES = {
    "h": np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
    "s": np.diag([1, 1j]).astype(complex),
    "sdg": np.diag([1, -1j]).astype(complex),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * math.pi / 4)]),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
}


class SimulationSizeError(ValueError):
    pass


def zero_state(n: int) -> np.ndarray:
    if n > MAX_QUBITS:
        raise SimulationSizeError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    sv = np.zeros(1 << n, dtype=complex)
    sv[0] = 1.0
    return sv


def _n_of(sv: np.ndarray) -> int:
    return int(sv.shape[0]).bit_length() - 1


def apply_pauli(sv: np.ndarray, p: PauliString) -> np.ndarray:
    if p.n != _n_of(sv):
        raise ValueError(f"Pauli on {p.n} qubits applied to {_n_of(sv)}-qubit state")
    idx = np.arange(sv.shape[0])
    src = idx ^ p.x
    # X^x Z^z form; Y = i X Z
    k = p.phase + (p.x & p.z).bit_count()
    signs = 1 - 2 * (np.bitwise_count(src & p.z).astype(np.int64) & 1)
    return (1j**k) * signs * sv[src]


def apply_rotation(sv: np.ndarray, r: PauliRotation) -> np.ndarray:
    """Apply ``exp(-i theta P) = cos(theta) I - i sin(theta) P``."""
    theta = r.angle
    return math.cos(theta) * sv - 1j * math.sin(theta) * apply_pauli(sv, r.operator)


def apply_gate(sv: np.ndarray, kind: str, qubits: tuple[int, ...]) -> np.ndarray:
    n = _n_of(sv)
    psi = sv.reshape((2,) * n)
    if kind == "cx":
        c, t = qubits
        out = psi.copy()
        ac, at = n - 1 - c, n - 1 - t
        sel = [slice(None)] * n
        sel[ac] = 1
        block = out[tuple(sel)]
        # target axis index shifts down by one if it follows the control axis
        out[tuple(sel)] = np.flip(block, axis=at - (1 if at > ac else 0))
        return out.reshape(-1)
    (q,) = qubits
    axis = n - 1 - q
    out = np.tensordot(GATE_MATRICES[kind], psi, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis).reshape(-1)


def project(sv: np.ndarray, p: PauliString, outcome: int) -> tuple[float, np.ndarray]:
    """Project onto the ``outcome`` eigenspace of ``p``; returns (prob, normalized state)."""
    branch = 0.5 * (sv + outcome * apply_pauli(sv, p))
    prob = float(np.vdot(branch, branch).real)
    if prob < 1e-15:
        return 0.0, branch
    return prob, branch / math.sqrt(prob)


def measure_pauli(sv: np.ndarray, p: PauliString, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    if p.is_identity:
        raise ValueError("cannot measure the identity")
    prob_plus, plus = project(sv, p, +1)
    if rng.random() < prob_plus:
        return +1, plus
    _, minus = project(sv, p, -1)
    return -1, minus


def circuit_state(c: Circuit) -> np.ndarray:
    sv = zero_state(c.n_qubits)
    for g in c.gates:
        sv = apply_gate(sv, g.kind, g.qubits)
    return sv


def circuit_distribution(c: Circuit) -> np.ndarray:
    """Exact distribution over measured bits; bit i of the outcome index is ``measured[i]``."""
    probs = np.abs(circuit_state(c)) ** 2
    idx = np.arange(probs.shape[0])
    keys = np.zeros_like(idx)
    for i, q in enumerate(c.measured):
        keys |= ((idx >> q) & 1) << i
    return np.bincount(keys, weights=probs, minlength=1 << len(c.measured))


def _magic_ancilla(sv: np.ndarray) -> np.ndarray:
    # ancilla is the new most significant qubit, prepared in (|0> + e^{i pi/4}|1>)/sqrt2
    return np.concatenate([sv, np.exp(1j * math.pi / 4) * sv]) * _SQ


def _lift(p: PauliString, ancilla_letter: str) -> PauliString:
    n = p.n + 1
    xb, zb = {"Z": (0, 1), "X": (1, 0)}[ancilla_letter]
    return PauliString(n, p.x | (xb << p.n), p.z | (zb << p.n), p.phase)


def _magic_branches(sv: np.ndarray, r: PauliRotation) -> list[tuple[float, np.ndarray]]:
    """Run one magic-state PPM gadget and return all four outcome branches.

    ``P_{pi/8}`` is realized by measuring ``P (x) Z`` against the ancilla,
    measuring the ancilla in X, then applying ``P_{pi/4}`` when the joint
    outcome is -1 and ``P`` when the ancilla outcome is -1.
    """
    half = sv.shape[0]
    p_eff = r.operator if r.eighths > 0 else -r.operator
    joint = _magic_ancilla(sv)
    zz = _lift(p_eff, "Z")
    out = []
    for s in (+1, -1):
        ps, after = project(joint, zz, s)
        if ps == 0.0:
            continue
        for x in (+1, -1):
            data = (after[:half] + x * after[half:]) * _SQ
            px = float(np.vdot(data, data).real)
            if px < 1e-15:
                continue
            data = data / math.sqrt(px)
            if s == -1:
                data = apply_rotation(data, PauliRotation(p_eff.unsigned(), 2 if p_eff.phase == 0 else -2))
            if x == -1:
                data = apply_pauli(data, p_eff)
            out.append((ps * px, data))
    return out


def _same_ray(a: np.ndarray, b: np.ndarray) -> bool:
    return abs(abs(np.vdot(a, b)) - 1.0) < 1e-9


def _merge(branches: list[tuple[float, np.ndarray]]) -> list[tuple[float, np.ndarray]]:
    merged: list[tuple[float, np.ndarray]] = []
    for prob, state in branches:
        for i, (q, s) in enumerate(merged):
            if _same_ray(state, s):
                merged[i] = (q + prob, s)
                break
        else:
            merged.append((prob, state))
    return merged


def _check_pbc_size(program: PbcProgram) -> None:
    if program.n_qubits + 1 > MAX_QUBITS:
        raise SimulationSizeError(
            f"program on {program.n_qubits} qubits needs {program.n_qubits + 1} > {MAX_QUBITS}"
        )


def pbc_distribution(program: PbcProgram) -> np.ndarray:
    """Exact terminal-outcome distribution of the magic-state PPM protocol.

    Every measurement branch is followed; branches whose states agree up to
    global phase are merged, which keeps the branch set small when the
    corrections are right and lets it grow (exposing the bug) when not.
    """
    _check_pbc_size(program)
    branches = [(1.0, zero_state(program.n_qubits))]
    for r in program.rotations:
        nxt = []
        for prob, sv in branches:
            nxt += [(prob * q, s) for q, s in _magic_branches(sv, r)]
        branches = _merge(nxt)

    k = len(program.measurements)
    dist = np.zeros(1 << k)
    for prob, sv in branches:
        stack = [(prob, sv, 0, 0)]
        while stack:
            pr, state, i, key = stack.pop()
            if i == k:
                dist[key] += pr
                continue
            for outcome, bit in ((+1, 0), (-1, 1)):
                q, after = project(state, program.measurements[i], outcome)
                if q > 0.0:
                    stack.append((pr * q, after, i + 1, key | (bit << i)))
    return dist


def sample_pbc_shot(program: PbcProgram, rng: np.random.Generator) -> int:
    """One shot of the protocol with sampled outcomes; returns the outcome index."""
    _check_pbc_size(program)
    sv = zero_state(program.n_qubits)
    for r in program.rotations:
        branches = _magic_branches(sv, r)
        u = rng.random()
        acc = 0.0
        for prob, state in branches:
            acc += prob
            sv = state
            if u < acc:
                break
    key = 0
    for i, m in enumerate(program.measurements):
        outcome, sv = measure_pauli(sv, m, rng)
        if outcome == -1:
            key |= 1 << i
    return key


def sample_counts(dist: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling; sharing ``uniforms`` between two samplers couples them."""
    cdf = np.cumsum(dist)
    cdf /= cdf[-1]
    picks = np.searchsorted(cdf, uniforms, side="right")
    picks = np.minimum(picks, dist.shape[0] - 1)
    return np.bincount(picks, minlength=dist.shape[0])


def run_circuit(c: Circuit, shots: int, rng: np.random.Generator) -> np.ndarray:
    return sample_counts(circuit_distribution(c), rng.random(shots))


def run_pbc(program: PbcProgram, shots: int, rng: np.random.Generator) -> np.ndarray:
    return sample_counts(pbc_distribution(program), rng.random(shots))


def tvd(a: np.ndarray, b: np.ndarray) -> float:
    pa = a / a.sum()
    pb = b / b.sum()
    return 0.5 * float(np.abs(pa - pb).sum())


def verify(c: Circuit, shots: int = 10_000, seed: int = 0, program: PbcProgram | None = None) -> float:
    """Sampled TVD between the circuit and its PBC program using paired shot seeds."""
    from .transpile import transpile

    program = program if program is not None else transpile(c)
    if not c.measured:
        return 0.0
    u = np.random.default_rng(seed).random(shots)
    return tvd(sample_counts(circuit_distribution(c), u), sample_counts(pbc_distribution(program), u))
