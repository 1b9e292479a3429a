import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from sparo.pauli import (
    DimensionError,
    PauliRotation,
    PauliString,
    commutes,
    conjugate,
    conjugate_by_quarter,
    multiply,
)


@st.composite
def paulis(draw, n=None, hermitian=False):
    n = n or draw(st.integers(1, 4))
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    phase = draw(st.sampled_from([0, 2] if hermitian else [0, 1, 2, 3]))
    return PauliString(n, x, z, phase)


@st.composite
def pairs(draw):
    n = draw(st.integers(1, 4))
    return draw(paulis(n)), draw(paulis(n))


def test_parse_and_letters():
    p = PauliString.parse("-iXYZI")
    assert p.letters() == "XYZI"
    assert p.phase == 3
    assert p.weight == 3
    assert p.qubits() == [0, 1, 2]
    assert str(PauliString.parse("ZZ")) == "+ZZ"


def test_xz_is_minus_iy():
    x = PauliString.single(1, 0, "X")
    z = PauliString.single(1, 0, "Z")
    assert multiply(x, z) == PauliString.parse("-iY")
    assert multiply(z, x) == PauliString.parse("+iY")


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliString.parse("X"), PauliString.parse("XX"))


@given(pairs())
def test_multiply_matches_matrices(ab):
    a, b = ab
    np.testing.assert_allclose(multiply(a, b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)


@given(pairs())
def test_commutation_matches_matrices(ab):
    a, b = ab
    ma, mb = a.to_matrix(), b.to_matrix()
    assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


@given(paulis())
def test_square_is_identity_up_to_phase(p):
    sq = multiply(p, p)
    assert sq.is_identity
    # (i^k P)^2 = i^{2k}
    assert sq.phase == (2 * p.phase) % 4


def test_rotation_validation():
    with pytest.raises(ValueError):
        PauliRotation(PauliString.identity(2), 1)
    with pytest.raises(ValueError):
        PauliRotation(PauliString.parse("iX"), 1)
    with pytest.raises(ValueError):
        PauliRotation(PauliString.parse("X"), 3)
    r = PauliRotation(PauliString.parse("-Z"), 1)
    assert r.operator == PauliString.parse("Z") and r.eighths == -1


def _unitary(r: PauliRotation) -> np.ndarray:
    return expm(-1j * r.angle * r.operator.to_matrix())


@given(paulis(n=2, hermitian=True).filter(lambda p: not p.is_identity),
       paulis(n=2, hermitian=True), st.sampled_from([2, -2, 4, -4]))
def test_conjugation_matches_matrices(c, t, eighths):
    rot = PauliRotation(c.unsigned(), eighths)
    u = _unitary(rot)
    expect = u.conj().T @ t.to_matrix() @ u
    np.testing.assert_allclose(conjugate(rot, t).to_matrix(), expect, atol=1e-12)


@given(paulis(n=3, hermitian=True).filter(lambda p: not p.is_identity), paulis(n=3, hermitian=True))
def test_quarter_round_trip(c, t):
    fwd = PauliRotation(c.unsigned(), 2)
    back = PauliRotation(c.unsigned(), -2)
    assert conjugate_by_quarter(back, conjugate_by_quarter(fwd, t)) == t


def test_z_quarter_maps_x_to_y():
    # exp(i pi/4 Z) X exp(-i pi/4 Z) = -Y under C^dag P C with C = exp(-i pi/4 Z)
    rot = PauliRotation(PauliString.parse("Z"), 2)
    u = _unitary(rot)
    out = conjugate(rot, PauliString.parse("X"))
    np.testing.assert_allclose(out.to_matrix(), u.conj().T @ PauliString.parse("X").to_matrix() @ u, atol=1e-12)
    assert out.letters() == "Y"
