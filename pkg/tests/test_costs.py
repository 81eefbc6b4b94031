import math

import numpy as np
import pytest

from qres.costs import (
    GateCounts,
    circuit_cost,
    half_spectral_range,
    kappa_q,
    measurement_count,
    optimal_range_shift,
    simulate_fc_measurement,
    spectral_descriptors,
    trotter_steps,
)
from qres.errors import ArgumentError, StateError
from qres.fermion_frag import FermionFragment, low_rank_decompose
from qres.pauli import PauliPolynomial, PauliProduct
from qres.pauli_frag import PauliFragment, attach_diagonalizers, sorted_insertion
from qres.states import SymmetrySector, WaveVector, hf_state

from conftest import cell


def poly(n, **coeffs):
    return PauliPolynomial(n, {PauliProduct.from_string(k): v for k, v in coeffs.items()})


def plus_state():
    return WaveVector(1, np.array([0, 1], dtype=np.int64),
                      np.array([1, 1], dtype=np.complex128) / np.sqrt(2))


def test_measurement_count_single_fragment():
    frag = PauliFragment([(PauliProduct.from_string("Z"), 1.0)], "commuting")
    m = measurement_count([frag], plus_state(), 1e-2)
    assert m == pytest.approx(1.0 / 1e-4)


def test_measurement_count_two_fragments_vs_allocation_oracle():
    """Var = {1, 4} at eps = 1: closed form gives (1+2)^2 = 9; brute-force
    integer shot allocation reaches variance <= eps^2 first at M = 9."""
    z = PauliFragment([(PauliProduct.from_string("ZI"), 1.0)], "commuting")
    x4 = PauliFragment([(PauliProduct.from_string("IX"), 2.0)], "commuting")
    state = WaveVector(2, np.array([0, 1], dtype=np.int64),
                       np.array([1, 1], dtype=np.complex128) / np.sqrt(2))
    m = measurement_count([z, x4], state, 1.0)
    assert m == pytest.approx(9.0)

    variances = [1.0, 4.0]
    best_m = None
    for total in range(2, 40):
        best = min(variances[0] / m1 + variances[1] / (total - m1)
                   for m1 in range(1, total))
        if best <= 1.0:
            best_m = total
            break
    assert best_m == 9


def test_measurement_count_rejects_bad_epsilon():
    frag = PauliFragment([(PauliProduct.from_string("Z"), 1.0)], "commuting")
    with pytest.raises(ArgumentError):
        measurement_count([frag], plus_state(), 0.0)


def test_kappa_zero_for_commuting_fragments():
    a = PauliFragment([(PauliProduct.from_string("ZI"), 1.0)], "commuting")
    b = PauliFragment([(PauliProduct.from_string("IZ"), 1.0)], "commuting")
    assert kappa_q([a, b], None, n_qubits=2) == pytest.approx(0.0, abs=1e-12)


def test_kappa_matches_dense_full_space():
    rng = np.random.default_rng(13)
    n = 4
    terms = list(PauliPolynomial(n, {
        PauliProduct(int(rng.integers(1, 16)), int(rng.integers(16)), n): float(rng.normal())
        for _ in range(8)
    }).terms.items())
    half = len(terms) // 2
    f1 = PauliFragment(terms[:half], "commuting")
    f2 = PauliFragment(terms[half:], "commuting")
    got = kappa_q([f1, f2], None, n_qubits=n)
    m1 = f1.polynomial().matrix()
    m2 = f2.polynomial().matrix()
    comm = m1 @ m2 - m2 @ m1
    want = float(np.max(np.abs(np.linalg.eigvalsh(1j * comm))))
    assert got == pytest.approx(want, rel=1e-9)


def test_descriptors_equal_ranges():
    frags = [PauliFragment([(PauliProduct.single(3, q, "Z"), 1.0)], "commuting")
             for q in range(3)]
    c, s_l, beta = spectral_descriptors(frags, None, n_qubits=3)
    assert s_l == pytest.approx(1.0 - 1.0 / 3.0)
    assert beta == pytest.approx(0.5 * c * c * s_l, abs=1e-12)


def test_single_fragment_descriptors_degenerate():
    frags = [PauliFragment([(PauliProduct.from_string("Z"), 1.0)], "commuting")]
    c, s_l, beta = spectral_descriptors(frags, None, n_qubits=1)
    assert s_l == pytest.approx(0.0)
    assert beta == pytest.approx(0.0)


def test_beta_bounds_kappa(h4_cell):
    fs = sorted_insertion(h4_cell.hq, "commuting")
    sec = SymmetrySector(electron_count=h4_cell.ints.n_electrons)
    k = kappa_q(fs, sec)
    _, _, beta = spectral_descriptors(fs, sec)
    assert beta >= k - 1e-9


def test_half_spectral_range_single_z():
    assert half_spectral_range(poly(1, Z=1.0)) == pytest.approx(1.0)


def test_trotter_steps_formula():
    n_s, tau = trotter_steps(1.0, 1e-3, 1.0, 2.0)
    assert n_s == 1000
    assert tau == pytest.approx(math.pi / 6.0)
    n_half, _ = trotter_steps(1.0, 1e-3, 0.5, 2.0)
    assert n_half == 2000
    with pytest.raises(ArgumentError):
        trotter_steps(-1.0, 1e-3, 1.0, 2.0)


def test_trotter_bound_random_two_fragment():
    """Dense propagator error <= kappa * tau / N_s on random 4-qubit splits."""
    import scipy.linalg as sla

    rng = np.random.default_rng(14)
    n = 4
    failures = 0
    for trial in range(50):
        terms = {}
        for _ in range(6):
            p = PauliProduct(int(rng.integers(16)), int(rng.integers(16)), n)
            if not p.is_identity:
                terms[p] = float(rng.normal())
        H = PauliPolynomial(n, terms)
        items = list(H.terms.items())
        f1 = PauliFragment(items[: len(items) // 2], "commuting")
        f2 = PauliFragment(items[len(items) // 2:], "commuting")
        m1, m2 = f1.polynomial().matrix(), f2.polynomial().matrix()
        kappa = kappa_q([f1, f2], None, n_qubits=n)
        if kappa < 1e-12:
            continue
        rng_full = float(np.max(np.linalg.eigvalsh(m1 + m2))
                         - np.min(np.linalg.eigvalsh(m1 + m2)))
        if rng_full < 1e-9:
            continue
        tau = math.pi / (3.0 * rng_full)
        exact = sla.expm(-1j * (m1 + m2) * tau)
        for n_s in (1, 2, 4, 8):
            step = sla.expm(-1j * m1 * tau / n_s) @ sla.expm(-1j * m2 * tau / n_s)
            approx = np.linalg.matrix_power(step, n_s)
            err = np.linalg.norm(exact - approx, 2)
            if err > kappa * tau / n_s + 1e-12:
                failures += 1
    assert failures == 0


def test_circuit_cost_trivial_fragment():
    from qres.pauli_frag import CliffordCircuit

    frag = PauliFragment([(PauliProduct.from_string("ZZ"), 1.0)], "commuting",
                         diagonalizer=CliffordCircuit(2, ()))
    gc = circuit_cost([frag])
    assert (gc.one_qubit, gc.two_qubit, gc.depth) == (0, 0, 0)


def test_circuit_cost_requires_diagonalizer():
    frag = PauliFragment([(PauliProduct.from_string("X"), 1.0)], "commuting")
    with pytest.raises(StateError):
        circuit_cost([frag])


def test_givens_full_rotation_count():
    rng = np.random.default_rng(15)
    q, _ = np.linalg.qr(rng.normal(size=(8, 8)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    frag = FermionFragment(q, rng.normal(size=8), np.zeros((8, 8)))
    gc = circuit_cost([frag])
    assert gc.two_qubit == pytest.approx(2 * 28)  # 28 rotations, 2 two-qubit gates each


def test_fc_si_gate_counts_within_2x_of_reported(h4_cell):
    reported = {"h4_chain_eq": (98, 47, 86), "h4_chain_corr": (107, 60, 109),
                "h4_chain_diss": (107, 60, 109), "h4_rect_corr": (101, 43, 77),
                "h4_rect_diss": (88, 58, 98)}
    fs = attach_diagonalizers(sorted_insertion(h4_cell.hq, "commuting"))
    gc = circuit_cost(fs)
    one, two, depth = reported[h4_cell.name]
    for mine, ref in ((gc.one_qubit, one), (gc.two_qubit, two), (gc.depth, depth)):
        assert mine <= 2 * ref and mine >= ref / 2, (h4_cell.name, gc, reported[h4_cell.name])


def test_monte_carlo_measurement_h2(h2):
    rng = np.random.default_rng(16)
    eps = 2e-3
    rms = simulate_fc_measurement(h2.hq, h2.ground[1], eps, n_trials=120, rng=rng)
    assert rms <= 1.1 * eps


def test_range_shift_lp_never_worse(h2):
    shift, half = optimal_range_shift(h2.hq, 2)
    assert half <= half_spectral_range(h2.hq) + 1e-9
