import numpy as np
import pytest

from qres.errors import ConsistencyError, OrthogonalityError
from qres.fermion_frag import (
    FermionFragment,
    SymmetryShift,
    apply_symmetry_shift,
    f3_repartition,
    fragment_resolved_norm,
    givens_decompose,
    lcu_norm_lr,
    low_rank_decompose,
    lr_lcu_optimize,
    reassemble_givens,
    reconstruct_tensors,
    rotate_state,
)
from qres.integrals import FermionicOperator, SpinOrbitalIntegrals, assemble_fermionic_hamiltonian
from qres.pauli import jordan_wigner
from qres.states import SymmetrySector, eigensolve, sector_basis

from conftest import cell, dense_fermionic, random_symmetric_tensors


def _random_orthogonal(rng, n):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def test_zero_g_single_fragment():
    n = 4
    h = np.diag([1.0, 1.0, -2.0, -2.0])
    ints = SpinOrbitalIntegrals(n, 2, h, np.zeros((n,) * 4), 0.0, "restricted")
    frags = low_rank_decompose(ints, tol=1e-6)
    assert len(frags) == 1
    assert frags[0].two_body.max() == 0.0


def test_low_rank_reconstruction_random():
    rng = np.random.default_rng(7)
    n = 4
    h, g = random_symmetric_tensors(rng, n, scale=0.2)
    op = FermionicOperator(n, h, g, 0.0)
    tol = 1e-10
    frags = low_rank_decompose(op, tol=tol)
    h2, g2 = reconstruct_tensors(frags)
    gnorm = np.linalg.norm(g.reshape(n * n, n * n), 2)
    assert np.max(np.abs(h2 - h)) < 1e-10
    assert np.max(np.abs(g2 - g)) < tol * max(gnorm, 1.0)


def test_low_rank_fixture_reconstruction(h4_cell):
    frags = low_rank_decompose(h4_cell.ints, tol=1e-8)
    h2, g2 = reconstruct_tensors(frags)
    assert np.max(np.abs(h2 - h4_cell.ints.h)) < 1e-8
    assert np.max(np.abs(g2 - h4_cell.ints.g)) < 1e-6


def test_supermatrix_symmetry_guard():
    n = 2
    g = np.zeros((n,) * 4)
    g[0, 1, 0, 0] = 1.0  # breaks (pq),(rs) <-> (rs),(pq)
    op = FermionicOperator(n, np.zeros((n, n)), g, 0.0)
    with pytest.raises(ConsistencyError):
        low_rank_decompose(op)


def test_givens_identity_and_2x2():
    assert givens_decompose(np.eye(5)) == []
    th = 0.37
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    rots = givens_decompose(rot)
    assert len(rots) == 1
    assert rots[0].p == 0 and rots[0].q == 1
    assert np.max(np.abs(reassemble_givens(rots, 2) - rot)) < 1e-12


def test_givens_random_8x8():
    rng = np.random.default_rng(8)
    q = _random_orthogonal(rng, 8)
    rots = givens_decompose(q)
    assert len(rots) <= 28
    assert np.max(np.abs(reassemble_givens(rots, 8) - q)) < 1e-10


def test_givens_rejects_non_orthogonal():
    with pytest.raises(OrthogonalityError):
        givens_decompose(np.ones((3, 3)))


def test_rotate_state_matches_jw_oracle(h2):
    frags = low_rank_decompose(h2.ints, tol=1e-10)
    psi = h2.ground[1].to_dense()
    for f in frags:
        exact = float(np.real(np.vdot(psi, f.to_polynomial().apply_dense(psi))))
        rho = np.abs(rotate_state(psi, f.rotation)) ** 2
        via_diag = float(rho @ f.diagonal_values(len(psi)))
        assert via_diag == pytest.approx(exact, abs=1e-8)


def test_lcu_norm_single_one_body():
    n = 2
    frag = FermionFragment(np.eye(n), np.array([2.0, 0.0]), np.zeros((n, n)))
    lam, nf = lcu_norm_lr([frag])
    assert nf == 1
    assert lam == pytest.approx(1.0)


def test_lr_lcu_collection_monotone(h4_cell):
    frags = low_rank_decompose(h4_cell.ints, tol=1e-8)
    out = lr_lcu_optimize(frags)
    assert fragment_resolved_norm(out) <= fragment_resolved_norm(frags) + 1e-12
    h1, g1 = reconstruct_tensors(frags)
    h2_, g2 = reconstruct_tensors(out)
    assert np.max(np.abs(h1 - h2_)) < 1e-8
    assert np.max(np.abs(g1 - g2)) < 1e-8


def test_lr_lcu_zero_g_unchanged():
    n = 2
    frag = FermionFragment(np.eye(n), np.array([1.0, -1.0]), np.zeros((n, n)))
    out = lr_lcu_optimize([frag])
    assert len(out) == 1
    assert np.allclose(out[0].one_body, frag.one_body)


def test_lr_lcu_toy_matches_grid_search():
    """2-orbital toy: collection point vs exhaustive grid over one fluid
    coefficient pattern (uniform c per fragment)."""
    rng = np.random.default_rng(9)
    n = 4
    h, g = random_symmetric_tensors(rng, n, scale=0.3)
    op = FermionicOperator(n, h, g, 0.0)
    frags = low_rank_decompose(op, tol=1e-10)
    out = lr_lcu_optimize(frags)
    best = fragment_resolved_norm(out)

    two = [f for f in frags if f.index != 0]
    h_base = np.einsum("pk,k,qk->pq", frags[0].rotation, frags[0].one_body, frags[0].rotation)
    grid = np.linspace(-1.5, 1.5, 41)
    grid_best = np.inf
    for scale in grid:
        h1 = h_base.copy()
        trial = [None]
        val = 0.0
        for f in two:
            c = scale * (np.diag(f.two_body) + (f.two_body - np.diag(np.diag(f.two_body))).sum(axis=1))
            h1 += np.einsum("pk,k,qk->pq", f.rotation, c, f.rotation)
            off = f.two_body - np.diag(np.diag(f.two_body))
            b = (np.diag(f.two_body) - c) / 2.0 + off.sum(axis=1) / 2.0
            val += np.abs(off).sum() / 4.0 + np.abs(b).sum()
        val += np.abs(np.linalg.eigvalsh(h1)).sum() / 2.0
        grid_best = min(grid_best, val)
    assert best <= grid_best + 1e-4


def test_f3_objective_never_increases(h4_cell):
    frags = low_rank_decompose(h4_cell.ints, tol=1e-8)
    proxy = h4_cell.proxy.state
    from qres.costs import measurement_count

    m_before = measurement_count(frags, proxy, 1e-3)
    _, m_after = f3_repartition(frags, proxy, epsilon=1e-3)
    assert m_after <= m_before + 1e-6


def test_f3_reconstruction_preserved(h4_cell):
    frags = low_rank_decompose(h4_cell.ints, tol=1e-8)
    out, _ = f3_repartition(frags, h4_cell.proxy.state)
    h1, g1 = reconstruct_tensors(frags)
    h2_, g2 = reconstruct_tensors(out)
    assert np.max(np.abs(h1 - h2_)) < 1e-8
    assert np.max(np.abs(g1 - g2)) < 1e-8


def test_f3_recovers_single_transfer_optimum():
    """Toy with one transferable occupation term: the optimizer must match a
    brute-force scan of the single fluid coefficient."""
    n = 2
    rng = np.random.default_rng(10)
    rot = np.eye(n)
    one = FermionFragment(rot, np.array([0.4, -0.2]), np.zeros((n, n)), index=0)
    lam = np.array([[0.5, 0.0], [0.0, 0.0]])
    two = FermionFragment(rot, np.zeros(n), lam, index=1)
    from qres.states import WaveVector

    amps = np.array([0.6, 0.8], dtype=complex)
    proxy = WaveVector(n, np.array([0b01, 0b10], dtype=np.int64), amps)
    out, m_opt = f3_repartition([one, two], proxy, epsilon=1.0)

    from qres.costs import measurement_count

    scan = []
    for c in np.linspace(-1.0, 1.0, 2001):
        h1 = np.diag(one.one_body + np.array([c, 0.0]))
        eps1, r1 = np.linalg.eigh(h1)
        f1 = FermionFragment(r1, eps1, np.zeros((n, n)), index=0)
        f2 = FermionFragment(rot, np.array([-c, 0.0]) , lam, index=1)
        scan.append(measurement_count([f1, f2], proxy, 1.0))
    assert m_opt <= min(scan) + 1e-6


def test_symmetry_shift_in_sector_spectrum():
    rng = np.random.default_rng(11)
    n = 4
    h, g = random_symmetric_tensors(rng, n, scale=0.2)
    op = FermionicOperator(n, h, g, 0.0)
    shift = SymmetryShift.for_electron_count(0.3, 0.7, -0.2, n_electrons=2)
    shifted = apply_symmetry_shift(op, shift)
    H0 = jordan_wigner(op)
    H1 = jordan_wigner(shifted)
    basis = sector_basis(n, SymmetrySector(electron_count=2))
    from qres.states import build_matrix

    v0 = np.linalg.eigvalsh(build_matrix(H0, basis).toarray())
    v1 = np.linalg.eigvalsh(build_matrix(H1, basis).toarray())
    assert np.allclose(v1, v0 - shift.sector_eigenvalue, atol=1e-10)


def test_shift_commutes_with_hamiltonian():
    rng = np.random.default_rng(12)
    n = 4
    h, g = random_symmetric_tensors(rng, n, scale=0.2)
    op = FermionicOperator(n, h, g, 0.0)
    dense_h = dense_fermionic(op)
    num = dense_fermionic(FermionicOperator(n, np.eye(n), None, 0.0))
    s = 0.1 * np.eye(1 << n) + 0.2 * num + 0.3 * (num @ num)
    assert np.max(np.abs(dense_h @ s - s @ dense_h)) < 1e-10


def test_s0_only_shift_leaves_ac_lambda():
    from qres.pauli_frag import lcu_norm_ac, sorted_insertion

    c = cell("h4_chain_eq")
    op = assemble_fermionic_hamiltonian(c.ints)
    shifted = apply_symmetry_shift(op, SymmetryShift(2.5, 0.0, 0.0, 0.0))
    lam0, n0 = lcu_norm_ac(sorted_insertion(c.hq, "anticommuting"))
    lam1, n1 = lcu_norm_ac(sorted_insertion(jordan_wigner(shifted), "anticommuting"))
    assert lam1 == pytest.approx(lam0, abs=1e-10)
    assert n1 == n0
