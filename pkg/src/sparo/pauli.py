"""Signed Pauli strings on bit masks, and Pauli rotations.

A Pauli string on ``n`` qubits is stored as two Python ints used as bit
vectors: bit ``q`` of ``x`` and ``z`` encodes the letter on qubit ``q``
(00=I, 10=X, 01=Z, 11=Y). The overall phase is ``i**phase`` in front of the
tensor product of *letters*, so ``Y`` itself carries phase 0.

Rotations use the convention ``P_theta = exp(-i * theta * P)``, under which
``T = Z_{pi/8}`` and ``S = Z_{pi/4}`` up to global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_LETTERS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_PHASE_PREFIX = {"+": 0, "+i": 1, "-": 2, "-i": 3, "i": 1, "": 0}
_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}

# rotation angles are stored as multiples of pi/8
_VALID_EIGHTHS = frozenset({1, -1, 2, -2, 4, -4})


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"masks do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        xb, zb = _LETTERS[letter.upper()]
        return cls(n, xb << qubit, zb << qubit)

    @classmethod
    def from_letters(cls, letters: dict[int, str], n: int, phase: int = 0) -> PauliString:
        x = z = 0
        for q, letter in letters.items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for n={n}")
            xb, zb = _LETTERS[letter.upper()]
            x |= xb << q
            z |= zb << q
        return cls(n, x, z, phase)

    @classmethod
    def parse(cls, text: str) -> PauliString:
        """Parse ``[+|-|+i|-i]LETTERS``; qubit 0 is the leftmost letter."""
        s = text.strip()
        i = 0
        while i < len(s) and s[i] in "+-i":
            i += 1
        prefix, body = s[:i], s[i:]
        if prefix not in _PHASE_PREFIX:
            raise ValueError(f"bad phase prefix {prefix!r}")
        if not body or any(c not in _LETTERS for c in body.upper()):
            raise ValueError(f"bad Pauli string {text!r}")
        x = z = 0
        for q, c in enumerate(body.upper()):
            xb, zb = _LETTERS[c]
            x |= xb << q
            z |= zb << q
        return cls(len(body), x, z, _PHASE_PREFIX[prefix])

    # inspection ---------------------------------------------------------

    def letter(self, q: int) -> str:
        xb = (self.x >> q) & 1
        zb = (self.z >> q) & 1
        return "IZXY"[xb * 2 + zb]

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    def qubits(self) -> list[int]:
        s = self.support
        out = []
        while s:
            low = s & -s
            out.append(low.bit_length() - 1)
            s ^= low
        return out

    @property
    def is_identity(self) -> bool:
        return self.support == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def unsigned(self) -> PauliString:
        return PauliString(self.n, self.x, self.z, 0)

    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.letters()

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def to_matrix(self):
        import numpy as np

        single = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        # qubit 0 is the least significant bit of the basis index
        m = np.eye(1, dtype=complex)
        for q in reversed(range(self.n)):
            m = np.kron(m, single[self.letter(q)])
        return (1j ** self.phase) * m


def _check_dims(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise DimensionError(f"qubit count mismatch: {a.n} vs {b.n}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Return the product ``a * b`` with exact phase."""
    _check_dims(a, b)
    # letter form -> X^x Z^z form: Y = i X Z, so each Y adds one power of i
    ka = a.phase + (a.x & a.z).bit_count()
    kb = b.phase + (b.x & b.z).bit_count()
    # Z^za X^xb = (-1)^{|za & xb|} X^xb Z^za
    k = ka + kb + 2 * (a.z & b.x).bit_count()
    x = a.x ^ b.x
    z = a.z ^ b.z
    return PauliString(a.n, x, z, k - (x & z).bit_count())


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_dims(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


@dataclass(frozen=True)
class PauliRotation:
    """``exp(-i * eighths * pi/8 * operator)`` with a phase-free operator."""

    operator: PauliString
    eighths: int

    def __post_init__(self) -> None:
        op = self.operator
        if op.is_identity:
            raise ValueError("rotation operator must not be the identity")
        if not op.is_hermitian:
            raise ValueError(f"rotation operator {op} is not Hermitian")
        if self.eighths not in _VALID_EIGHTHS:
            raise ValueError(f"unsupported rotation angle {self.eighths}*pi/8")
        if op.phase == 2:
            object.__setattr__(self, "operator", op.unsigned())
            object.__setattr__(self, "eighths", -self.eighths)

    @property
    def angle(self) -> float:
        return self.eighths * math.pi / 8

    @property
    def is_clifford(self) -> bool:
        return abs(self.eighths) in (2, 4)

    @property
    def angle_label(self) -> str:
        sign = "+" if self.eighths > 0 else "-"
        return sign + {1: "pi/8", 2: "pi/4", 4: "pi/2"}[abs(self.eighths)]

    def __str__(self) -> str:
        return f"{self.operator.letters()}({self.angle_label})"


def conjugate_by_quarter(clifford: PauliRotation, target: PauliString) -> PauliString:
    """Move a pi/4 rotation ``C`` past ``target``: returns ``C^dag target C``.

    Commuting operators are returned unchanged; anticommuting ones become
    ``i P P'`` for ``+pi/4`` and ``-i P P'`` for ``-pi/4``.
    """
    if abs(clifford.eighths) != 2:
        raise ValueError("conjugate_by_quarter needs a +-pi/4 rotation")
    _check_dims(clifford.operator, target)
    if commutes(clifford.operator, target):
        return target
    prod = multiply(clifford.operator, target)
    shift = 1 if clifford.eighths > 0 else 3
    return PauliString(prod.n, prod.x, prod.z, prod.phase + shift)


def conjugate_by_half(clifford: PauliRotation, target: PauliString) -> PauliString:
    """``C^dag target C`` for a pi/2 rotation, i.e. conjugation by the Pauli."""
    if abs(clifford.eighths) != 4:
        raise ValueError("conjugate_by_half needs a +-pi/2 rotation")
    _check_dims(clifford.operator, target)
    return target if commutes(clifford.operator, target) else -target


def conjugate(clifford: PauliRotation, target: PauliString) -> PauliString:
    if abs(clifford.eighths) == 2:
        return conjugate_by_quarter(clifford, target)
    return conjugate_by_half(clifford, target)


def fold_sign(op: PauliString, eighths: int) -> PauliRotation:
    """Build a rotation from a signed Hermitian operator, moving -1 into the angle."""
    return PauliRotation(op, eighths)
