"""Bundled benchmark circuits and synthetic PBC workloads."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .circuit import Circuit, load_circuit, parse_circuit
from .pauli import PauliRotation, PauliString
from .transpile import PbcProgram, layerize

BUNDLED = ("tiny", "toffoli", "adder_n10", "qft_n16", "adder_n28", "multiplier_n24", "adder_n46")


def toffoli(c: Circuit, a: int, b: int, t: int) -> None:
    """Standard 7-T decomposition."""
    for kind, *qs in (
        ("h", t), ("cx", b, t), ("tdg", t), ("cx", a, t), ("t", t), ("cx", b, t),
        ("tdg", t), ("cx", a, t), ("t", b), ("t", t), ("h", t), ("cx", a, b),
        ("t", a), ("tdg", b), ("cx", a, b),
    ):
        c.add(kind, *qs)


def controlled_s(c: Circuit, a: int, b: int) -> None:
    for kind, *qs in (("t", a), ("t", b), ("cx", a, b), ("tdg", b), ("cx", a, b)):
        c.add(kind, *qs)


def cuccaro_adder(bits: int) -> Circuit:
    """Ripple-carry adder on 2*bits + 2 qubits (carry-in, a, b, carry-out)."""
    n = 2 * bits + 2
    c = Circuit(n, [], tuple(range(n)), name=f"adder_n{n}")
    a = [1 + 2 * i for i in range(bits)]
    b = [2 + 2 * i for i in range(bits)]
    cin, cout = 0, n - 1
    for q in a:
        c.add("x", q)
    carry = [cin] + a
    for i in range(bits):
        c.add("cx", a[i], b[i])
        c.add("cx", a[i], carry[i])
        toffoli(c, carry[i], b[i], a[i])
    c.add("cx", a[-1], cout)
    for i in reversed(range(bits)):
        toffoli(c, carry[i], b[i], a[i])
        c.add("cx", a[i], carry[i])
        c.add("cx", carry[i], b[i])
    return c


def qft_style(n: int) -> Circuit:
    """QFT skeleton with every controlled phase replaced by controlled-S."""
    c = Circuit(n, [], tuple(range(n)), name=f"qft_n{n}")
    for i in range(n):
        c.add("h", i)
        for j in range(i + 1, n):
            controlled_s(c, j, i)
    return c


def toffoli_ladder(n: int) -> Circuit:
    """Shift-and-add style network: a Toffoli from each pair onto a rotating target."""
    c = Circuit(n, [], tuple(range(n)), name=f"multiplier_n{n}")
    half = n // 2
    for q in range(half):
        c.add("h", q)
    for i in range(half):
        for j in range(i % 2, half, 2):
            t = half + (i + j) % (n - half)
            if j != i:
                toffoli(c, i, j, t)
    return c


def generate(name: str) -> Circuit:
    if name == "tiny":
        return parse_circuit("qubits 2\nh 0\nt 0\ncx 0 1\nt 1\nh 1\nmeasure 0 1\n", "tiny")
    if name == "toffoli":
        c = Circuit(3, [], (0, 1, 2), name="toffoli")
        c.add("h", 0).add("h", 1)
        toffoli(c, 0, 1, 2)
        return c
    kind, _, size = name.rpartition("_n")
    if kind == "adder":
        return cuccaro_adder((int(size) - 2) // 2)
    if kind == "qft":
        return qft_style(int(size))
    if kind == "multiplier":
        return toffoli_ladder(int(size))
    raise KeyError(name)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("sparo") / "data" / f"{name}.qc"))


def load_bundled(name: str) -> Circuit:
    return load_circuit(bundled_path(name))


def resolve_circuit(spec: str) -> Circuit:
    """A path to a ``.qc`` file, or the name of a bundled benchmark."""
    p = Path(spec)
    if p.exists() or spec not in BUNDLED:
        return load_circuit(p)
    return load_bundled(spec)


# ------------------------------------------------------------ synthetic


def _random_pauli(n: int, qubits: np.ndarray, rng: np.random.Generator) -> PauliString:
    x = z = 0
    for q, letter in zip(qubits.tolist(), rng.integers(0, 3, size=len(qubits)).tolist()):
        if letter != 0:
            x |= 1 << q
        if letter != 1:
            z |= 1 << q
    return PauliString(n, x, z, 0)


def fit_weights(
    k: int,
    n: int,
    w_min: int,
    mean: float,
    w_max: int,
    std: float,
    rng: np.random.Generator,
    tol: float = 0.01,
) -> np.ndarray:
    """Integer weights in [w_min, w_max] hitting both extremes, the mean to
    rounding and the population std within ``tol``."""
    if not (w_min <= mean <= w_max <= n):
        raise ValueError("inconsistent weight targets")
    # a heavy-tailed start, rescaled onto the targets
    w = rng.lognormal(0.0, 1.0, size=k)
    w = mean + (w - w.mean()) * std / w.std()
    w = np.clip(np.rint(w), w_min, w_max).astype(np.int64)
    w[0], w[1] = w_min, w_max
    target_sum = int(round(mean * k))
    free = np.arange(2, k)
    for _ in range(200 * k):
        diff = target_sum - int(w.sum())
        cur = float(w.std())
        if diff == 0 and abs(cur - std) <= tol:
            return w
        i = int(rng.choice(free))
        if diff != 0:
            step = 1 if diff > 0 else -1
            # move the entry that also pushes the std towards the target
            spread = (w[i] - w.mean()) * step > 0
            if spread == (cur < std) and w_min <= w[i] + step <= w_max:
                w[i] += step
            continue
        j = int(rng.choice(free))
        lo, hi = (i, j) if w[i] <= w[j] else (j, i)
        if cur < std and w[lo] > w_min and w[hi] < w_max:
            w[lo] -= 1
            w[hi] += 1
        elif cur > std and w[hi] - w[lo] >= 2:
            w[lo] += 1
            w[hi] -= 1
    raise RuntimeError("weight fit did not converge")


def synthetic_program(
    n: int,
    k: int,
    w_min: int,
    mean: float,
    w_max: int,
    std: float,
    seed: int = 0,
    name: str | None = None,
) -> PbcProgram:
    """Random pi/8 rotations whose weight statistics match the targets."""
    rng = np.random.default_rng(seed)
    weights = fit_weights(k, n, w_min, mean, w_max, std, rng)
    rots = []
    for w in weights.tolist():
        qs = rng.choice(n, size=w, replace=False)
        rots.append(PauliRotation(_random_pauli(n, qs, rng), int(rng.choice((1, -1)))))
    meas = [PauliString.single(n, q, "Z") for q in range(n)]
    prog = PbcProgram(n, rots, [], meas, tuple(range(n)), name or f"synthetic_n{n}")
    return layerize(prog)


def adder433_like(seed: int = 0) -> PbcProgram:
    """433 qubits, 1536 magic PPMs, weights [3, 112.25, 433] with std 137.74."""
    return synthetic_program(433, 1536, 3, 112.25, 433, 137.74, seed, "adder_n433_synthetic")


def qft_workload(n: int, x_every: int = 4) -> PbcProgram:
    """Stride-ordered ZZ phase rotations with periodic X-basis layers.

    Stride s couples (i, i + s); every ``x_every`` strides all qubits get an
    X rotation, which forces patch rotations in the following layers.
    """
    rots = []
    for s in range(1, n):
        for i in range(n - s):
            rots.append(PauliRotation(PauliString.from_letters({i: "Z", i + s: "Z"}, n), 1))
        if s % x_every == 0:
            rots += [PauliRotation(PauliString.single(n, q, "X"), 1) for q in range(n)]
    meas = [PauliString.single(n, q, "Z") for q in range(n)]
    return layerize(PbcProgram(n, rots, [], meas, tuple(range(n)), f"qft_workload_n{n}"))


def random_program(
    n: int, k: int, rng: np.random.Generator, max_weight: int = 4, name: str = "random"
) -> PbcProgram:
    """Small random programs for property and monotonicity checks."""
    rots = []
    for _ in range(k):
        w = int(rng.integers(1, min(max_weight, n) + 1))
        qs = rng.choice(n, size=w, replace=False)
        rots.append(PauliRotation(_random_pauli(n, qs, rng), int(rng.choice((1, -1)))))
    meas = [PauliString.single(n, q, "Z") for q in range(n)]
    return layerize(PbcProgram(n, rots, [], meas, tuple(range(n)), name))
