import numpy as np
import pytest

from qres.errors import KindError
from qres.pauli import PauliPolynomial, PauliProduct
from qres.pauli_frag import (
    CliffordCircuit,
    lcu_norm_ac,
    sorted_insertion,
    synthesize_diagonalizer,
)


def poly(n, **coeffs):
    return PauliPolynomial(n, {PauliProduct.from_string(k): v for k, v in coeffs.items()})


def test_two_term_anticommuting_group():
    H = poly(1, Z=2.0, X=1.0)
    fs = sorted_insertion(H, "anticommuting")
    lam, nu = lcu_norm_ac(fs)
    assert nu == 1
    assert lam == pytest.approx(np.sqrt(5.0))


def test_three_term_commuting_group():
    H = poly(2, ZI=1.0, IZ=1.0, XX=1.0)
    fs = sorted_insertion(H, "commuting")
    assert len(fs) == 1


def test_reconstruction_and_determinism(h4_cell):
    H = h4_cell.hq
    for kind in ("commuting", "anticommuting"):
        fs1 = sorted_insertion(H, kind)
        fs2 = sorted_insertion(H, kind)
        assert [len(f.members) for f in fs1] == [len(f.members) for f in fs2]
        total = PauliPolynomial(H.n_qubits, {})
        for f in fs1:
            total = total + f.polynomial()
        for p, c in H.without_identity().terms.items():
            assert total.coefficient(p) == pytest.approx(c, abs=1e-12)
        assert fs1.constant == pytest.approx(H.constant)


def test_kind_validation():
    H = poly(1, Z=1.0)
    with pytest.raises(KindError):
        sorted_insertion(H, "diagonal")
    ac = sorted_insertion(H, "anticommuting")
    with pytest.raises(KindError):
        synthesize_diagonalizer(ac.fragments[0])
    fc = sorted_insertion(H, "commuting")
    with pytest.raises(KindError):
        lcu_norm_ac(fc)


def test_ac_groups_are_unitary_after_normalization(h2):
    fs = sorted_insertion(h2.hq, "anticommuting")
    dim = 1 << h2.hq.n_qubits
    for f in fs:
        A = f.polynomial().matrix() / f.two_norm()
        assert np.allclose(A.conj().T @ A, np.eye(dim), atol=1e-10)


def test_diagonalizer_single_x():
    H = poly(1, X=1.0)
    fs = sorted_insertion(H, "commuting")
    circ = synthesize_diagonalizer(fs.fragments[0])
    assert circ.gates == (("H", 0),)


def test_diagonalizer_already_diagonal():
    H = poly(2, ZI=1.0, IZ=0.5)
    fs = sorted_insertion(H, "commuting")
    circ = synthesize_diagonalizer(fs.fragments[0])
    assert circ.gates == ()


def test_diagonalizer_random_commuting_sets():
    rng = np.random.default_rng(3)
    n = 6
    for _ in range(10):
        # random commuting set: conjugate a set of z-strings by random cliffords
        gates = []
        for _ in range(25):
            kind = rng.integers(3)
            if kind == 0:
                gates.append(("H", int(rng.integers(n))))
            elif kind == 1:
                gates.append(("S", int(rng.integers(n))))
            else:
                c, t = rng.choice(n, size=2, replace=False)
                gates.append(("CNOT", int(c), int(t)))
        scrambler = CliffordCircuit(n, tuple(gates))
        members = []
        for _ in range(5):
            z = int(rng.integers(1, 1 << n))
            p, _ = scrambler.conjugate_pauli(PauliProduct(0, z, n))
            members.append((p, float(rng.normal())))
        frag_poly = PauliPolynomial(n, dict(members))
        fs = sorted_insertion(frag_poly, "commuting")
        assert len(fs) == 1
        circ = synthesize_diagonalizer(fs.fragments[0])
        for p, _ in fs.fragments[0].members:
            p2, sign = circ.conjugate_pauli(p)
            assert p2.is_all_z and sign in (-1, 1)


def test_conjugation_matches_dense_for_every_gate():
    rng = np.random.default_rng(4)
    for gates in [(("H", 0),), (("S", 0),), (("CNOT", 0, 1),),
                  (("H", 1), ("CNOT", 1, 0), ("S", 0))]:
        circ = CliffordCircuit(2, gates)
        U = np.stack([circ.apply_to_state(col.copy())
                      for col in np.eye(4, dtype=complex).T], axis=1)
        for x in range(4):
            for z in range(4):
                p = PauliProduct(x, z, 2)
                p2, sign = circ.conjugate_pauli(p)
                lhs = U @ p.matrix() @ U.conj().T
                assert np.allclose(lhs, sign * p2.matrix(), atol=1e-12), (gates, x, z)


def test_circuit_depth_and_counts():
    circ = CliffordCircuit(3, (("H", 0), ("H", 1), ("CNOT", 0, 1), ("S", 2)))
    one, two = circ.gate_counts()
    assert (one, two) == (3, 1)
    assert circ.depth() == 2  # H0 | H1 | S2 parallel, then CNOT
