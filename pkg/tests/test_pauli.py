import numpy as np
import pytest

from qres.errors import DimensionError, NormalizationError
from qres.integrals import FermionicOperator
from qres.pauli import (
    PauliPolynomial,
    PauliProduct,
    anticommutes,
    commutes,
    expectation,
    jordan_wigner,
    multiply,
    variance,
)
from qres.states import WaveVector, hf_state

from conftest import dense_fermionic, random_symmetric_tensors


def test_single_qubit_products():
    x, y, z = (PauliProduct.from_string(s) for s in "XYZ")
    xy = multiply(x, y)
    assert xy.to_string() == "Z" and xy.phase == 1j


@pytest.mark.parametrize("s", ["X", "Y", "Z", "XYZI", "ZZZZ"])
def test_involution(s):
    p = PauliProduct.from_string(s)
    sq = multiply(p, p)
    assert sq.is_identity and sq.phase == 1


def test_multiply_matches_dense_oracle():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a = PauliProduct(int(rng.integers(16)), int(rng.integers(16)), 4, int(rng.integers(4)))
        b = PauliProduct(int(rng.integers(16)), int(rng.integers(16)), 4, int(rng.integers(4)))
        ab = multiply(a, b)
        lhs = (a.phase * PauliProduct(a.x, a.z, 4).matrix()) @ (
            b.phase * PauliProduct(b.x, b.z, 4).matrix())
        rhs = ab.phase * PauliProduct(ab.x, ab.z, 4).matrix()
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_multiply_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliProduct.from_string("X"), PauliProduct.from_string("XX"))


def test_commutes_examples():
    assert commutes(PauliProduct.from_string("ZZ"), PauliProduct.from_string("XX"))
    assert anticommutes(PauliProduct.from_string("Z"), PauliProduct.from_string("X"))


def test_commutes_matches_dense():
    rng = np.random.default_rng(1)
    for _ in range(100):
        a = PauliProduct(int(rng.integers(32)), int(rng.integers(32)), 5)
        b = PauliProduct(int(rng.integers(32)), int(rng.integers(32)), 5)
        comm = a.matrix() @ b.matrix() - b.matrix() @ a.matrix()
        assert commutes(a, b) == np.allclose(comm, 0, atol=1e-12)


def test_jw_number_operator():
    op = FermionicOperator(1, np.array([[-1.25]]), np.zeros((1,) * 4), 0.0)
    poly = jordan_wigner(op)
    assert poly.terms[PauliProduct.from_string("I")] == pytest.approx(-0.625)
    assert poly.terms[PauliProduct.from_string("Z")] == pytest.approx(0.625)


def test_jw_core_only():
    op = FermionicOperator(2, np.zeros((2, 2)), np.zeros((2,) * 4), 5.0)
    poly = jordan_wigner(op)
    assert len(poly) == 1 and poly.constant == pytest.approx(5.0)


def test_jw_matches_dense_fermionic_oracle():
    rng = np.random.default_rng(2)
    h, g = random_symmetric_tensors(rng, 4)
    op = FermionicOperator(4, h, g, 0.3)
    assert np.allclose(jordan_wigner(op).matrix(), dense_fermionic(op), atol=1e-10)


def test_jw_spectrum_h2(h2):
    dense = dense_fermionic(
        FermionicOperator(4, h2.ints.h, h2.ints.g, h2.ints.e_core))
    got = np.sort(np.linalg.eigvalsh(h2.hq.matrix()))
    want = np.sort(np.linalg.eigvalsh(dense))
    assert np.allclose(got, want, atol=1e-10)


def test_particle_number_mapping():
    n = 4
    ne = jordan_wigner(FermionicOperator(n, np.eye(n), None, 0.0))
    ident = PauliProduct.identity(n)
    assert ne.terms[ident] == pytest.approx(n / 2)
    for q in range(n):
        zq = PauliProduct.single(n, q, "Z")
        assert ne.terms[zq] == pytest.approx(-0.5)


def test_global_parity_commutes_with_fixture(h2):
    n = h2.hq.n_qubits
    parity = PauliProduct(0, (1 << n) - 1, n)
    assert all(commutes(parity, p) for p in h2.hq.terms)


def test_expectation_and_variance_examples():
    z = PauliPolynomial(1, {PauliProduct.from_string("Z"): 1.0})
    x = PauliPolynomial(1, {PauliProduct.from_string("X"): 1.0})
    zero = WaveVector.basis_state(1, 0)
    assert expectation(z, zero) == pytest.approx(1.0)
    assert variance(z, zero) == pytest.approx(0.0, abs=1e-12)
    assert expectation(x, zero) == pytest.approx(0.0, abs=1e-12)
    assert variance(x, zero) == pytest.approx(1.0)


def test_expectation_requires_normalized_state():
    z = PauliPolynomial(1, {PauliProduct.from_string("Z"): 1.0})
    bad = WaveVector(1, np.array([0], dtype=np.int64), np.array([2.0 + 0j]))
    with pytest.raises(NormalizationError):
        expectation(z, bad)


def test_ground_state_expectation_variance(h4_cell):
    e0, gs = h4_cell.ground
    assert expectation(h4_cell.hq, gs) == pytest.approx(e0, abs=1e-8)
    assert variance(h4_cell.hq, gs) < 1e-8


def test_polynomial_text_roundtrip(h2):
    text = h2.hq.to_lines()
    back = PauliPolynomial.from_lines(text)
    assert back.terms.keys() == h2.hq.terms.keys()
    for p, c in h2.hq.terms.items():
        assert back.terms[p] == pytest.approx(c, abs=1e-14)


def test_phase_normalized_keys_only():
    with pytest.raises(ValueError):
        PauliPolynomial(1, {PauliProduct(1, 0, 1, phase_power=1): 1.0})


def test_simplification_threshold():
    p = PauliProduct.from_string("X")
    poly = PauliPolynomial(1, {p: 1e-13})
    assert len(poly) == 0
