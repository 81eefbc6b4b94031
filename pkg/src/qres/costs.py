"""Scalar cost metrics: measurement counts, symmetry-projected commutator
norms, spectral-range descriptors, Trotter step counts, circuit-cost models,
and symmetry-shift optimization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ArgumentError, KindError, NormalizationError, StateError, SymmetryError
from .fermion_frag import (
    FermionFragment,
    SymmetryShift,
    apply_symmetry_shift,
    givens_decompose,
    low_rank_decompose,
    lcu_norm_lr,
    number_operator_polynomials,
    rotate_state,
)
from .integrals import FermionicOperator
from .kernels import zpoly_values
from .pauli import PauliPolynomial, commutes, jordan_wigner, variance
from .pauli_frag import (
    CliffordCircuit,
    FragmentSet,
    PauliFragment,
    attach_diagonalizers,
    lcu_norm_ac,
    rotated_z_polynomial,
    sorted_insertion,
)
from .states import (
    SymmetrySector,
    WaveVector,
    build_matrix,
    extremal_eigenvalues,
    sector_basis,
)


@dataclass
class GateCounts:
    one_qubit: float
    two_qubit: float
    depth: float


@dataclass
class CostReport:
    """All scalar metrics for one (molecule, geometry, method) cell."""

    method: str
    molecule: str = ""
    geometry: str = ""
    m_eps: float | None = None
    epsilon: float | None = None
    kappa_q: float | None = None
    lam: float | None = None
    n_unitaries: int | None = None
    n_fragments: int | None = None
    half_spectral_range: float | None = None
    c_total: float | None = None
    s_linear: float | None = None
    beta: float | None = None
    trotter_steps: int | None = None
    tau: float | None = None
    gate_counts: GateCounts | None = None
    shift: tuple[float, float, float] | None = None

    def validate(self):
        if self.c_total is not None and self.s_linear is not None and self.beta is not None:
            if abs(self.beta - 0.5 * self.c_total ** 2 * self.s_linear) > 1e-9:
                raise ArgumentError("beta != C^2 S_L / 2")
        if (self.lam is not None and self.half_spectral_range is not None
                and self.lam < self.half_spectral_range - 1e-9):
            raise ArgumentError("lambda below half spectral range")


# ---------------------------------------------------------------------------
# measurement counts

def fragment_variance(frag, proxy: WaveVector) -> float:
    """Exact proxy variance of one measurable fragment."""
    if isinstance(frag, PauliFragment):
        return variance(frag.polynomial(), proxy)
    if isinstance(frag, FermionFragment):
        if abs(proxy.norm() - 1.0) > 1e-10:
            raise NormalizationError("proxy state is not normalized")
        dense = proxy.to_dense()
        rho = np.abs(rotate_state(dense, frag.rotation)) ** 2
        vals = frag.diagonal_values(dense.shape[0])
        mean = float(rho @ vals)
        return max(float(rho @ vals ** 2 - mean ** 2), 0.0)
    raise KindError(f"unmeasurable fragment type {type(frag).__name__}")


def measurement_count(fragset: FragmentSet | list, proxy: WaveVector, eps: float) -> float:
    """Optimal-allocation measurement count  eps^-2 [sum_a sqrt(Var_a)]^2."""
    if eps <= 0:
        raise ArgumentError("epsilon must be positive")
    frags = list(fragset)
    total = sum(math.sqrt(fragment_variance(f, proxy)) for f in frags)
    return float(total ** 2 / eps ** 2)


# ---------------------------------------------------------------------------
# symmetry-projected commutator norms

def _fragment_matrices(frags: list, basis: np.ndarray, n_qubits: int,
                       sector: SymmetrySector | None):
    mats = []
    for f in frags:
        poly = f.polynomial() if isinstance(f, PauliFragment) else f.to_polynomial()
        if sector is not None:
            for g in sector.generators:
                if any(not commutes(g, p) for p, _ in poly.terms.items()):
                    raise SymmetryError("sector generator fails to commute with a fragment")
        mats.append(build_matrix(poly, basis))
    return mats


def _spectral_norm(mat) -> float:
    dim = mat.shape[0]
    if dim <= 1500:
        herm = 1j * mat.toarray()
        return float(np.max(np.abs(np.linalg.eigvalsh(herm))))
    val = spla.svds(mat.tocsc(), k=1, return_singular_vectors=False, tol=1e-9)
    return float(val[0])


def kappa_q(fragset: FragmentSet | list, sector: SymmetrySector | None,
            n_qubits: int | None = None) -> float:
    """Sum over distinct fragment pairs of sector-projected commutator
    spectral norms (each unordered pair counted once, matching the
    reported first-order Trotter metric)."""
    frags = list(fragset)
    nq = n_qubits or getattr(fragset, "n_qubits", None) or frags[0].n_qubits
    basis = sector_basis(nq, sector)
    mats = _fragment_matrices(frags, basis, nq, sector)
    total = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            total += _spectral_norm(comm)
    return float(total)


def spectral_descriptors(fragset: FragmentSet | list, sector: SymmetrySector | None,
                         n_qubits: int | None = None) -> tuple[float, float, float]:
    """(C, S_L, beta) from sector-projected fragment spectral half-ranges
    (range/2 per fragment, the radius convention of the reported table)."""
    frags = list(fragset)
    nq = n_qubits or getattr(fragset, "n_qubits", None) or frags[0].n_qubits
    basis = sector_basis(nq, sector)
    ranges = []
    for f in frags:
        if isinstance(f, FermionFragment) and sector is not None and not sector.generators:
            vals = f.diagonal_values(1 << nq)[basis]
        else:
            poly = f.polynomial() if isinstance(f, PauliFragment) else f.to_polynomial()
            vals = np.linalg.eigvalsh(build_matrix(poly, basis).toarray())
        ranges.append(float(vals.max() - vals.min()) / 2.0)
    ranges = np.array(ranges)
    c_total = float(ranges.sum())
    if c_total <= 0:
        return 0.0, 0.0, 0.0
    omega = ranges / c_total
    s_l = float(1.0 - np.sum(omega ** 2))
    beta = 0.5 * c_total ** 2 * s_l
    return c_total, s_l, beta


def half_spectral_range(H: PauliPolynomial, sector: SymmetrySector | None = None) -> float:
    emin, emax = extremal_eigenvalues(H, sector)
    return 0.5 * (emax - emin)


def trotter_steps(kappa: float, eps: float, p0: float, spectral_range: float) -> tuple[int, float]:
    """First-order step count N_s = ceil(kappa/(eps*p0)) and the aliasing
    time tau = pi/(3*spectral_range) it refers to."""
    if kappa <= 0 or eps <= 0 or spectral_range <= 0 or not (0 < p0 <= 1):
        raise ArgumentError("all inputs must be positive, p0 in (0, 1]")
    tau = math.pi / (3.0 * spectral_range)
    return int(math.ceil(kappa / (eps * p0))), tau


# ---------------------------------------------------------------------------
# circuit-cost model

def _schedule(gates: list[tuple[str, tuple[int, ...]]]) -> int:
    avail: dict[int, int] = {}
    depth = 0
    for _, qubits in gates:
        slot = max((avail.get(q, 0) for q in qubits), default=0) + 1
        for q in qubits:
            avail[q] = slot
        depth = max(depth, slot)
    return depth


def circuit_cost(fragset: FragmentSet | list) -> GateCounts:
    """Average per-fragment gate counts and depth under the unit-time,
    all-to-all model. Givens rotations expand to two 2-qubit gates plus two
    1-qubit rotations."""
    frags = list(fragset)
    ones, twos, depths = [], [], []
    for f in frags:
        if isinstance(f, PauliFragment):
            if f.diagonalizer is None:
                raise StateError("fragment missing its diagonalizer")
            one, two = f.diagonalizer.gate_counts()
            ones.append(one)
            twos.append(two)
            depths.append(f.diagonalizer.depth())
        elif isinstance(f, FermionFragment):
            rots = givens_decompose(f.rotation)
            gates: list[tuple[str, tuple[int, ...]]] = []
            for r in rots:
                gates.extend([
                    ("2q", (r.p, r.q)),
                    ("1q", (r.p,)),
                    ("1q", (r.q,)),
                    ("2q", (r.p, r.q)),
                ])
            ones.append(2 * len(rots))
            twos.append(2 * len(rots))
            depths.append(_schedule(gates))
        else:
            raise StateError(f"no circuit model for {type(f).__name__}")
    return GateCounts(float(np.mean(ones)), float(np.mean(twos)), float(np.mean(depths)))


# ---------------------------------------------------------------------------
# Monte-Carlo consistency check of the measurement protocol

def simulate_fc_measurement(H: PauliPolynomial, state: WaveVector, eps: float,
                            n_trials: int, rng: np.random.Generator) -> float:
    """RMS error of the optimal-allocation FC-SI energy estimate measured with
    M(eps) shots, over n_trials independent repetitions."""
    fragset = attach_diagonalizers(sorted_insertion(H, "commuting"))
    dense = state.to_dense()
    dim = dense.shape[0]
    data = []
    sigmas = []
    for f in fragset:
        rotated = f.diagonalizer.apply_to_state(dense)
        probs = np.abs(rotated) ** 2
        probs = probs / probs.sum()
        zterms = rotated_z_polynomial(f)
        zs = np.array([z for z, _ in zterms], dtype=np.int64)
        cs = np.array([c for _, c in zterms], dtype=np.float64)
        vals = zpoly_values(zs, cs, dim)
        mean = float(probs @ vals)
        var = max(float(probs @ vals ** 2 - mean ** 2), 0.0)
        data.append((probs, vals, var))
        sigmas.append(math.sqrt(var))
    total_sigma = sum(sigmas)
    m_total = total_sigma ** 2 / eps ** 2

    exact = sum(float(p @ v) for p, v, _ in data) + fragset.constant
    errors = np.empty(n_trials)
    for t in range(n_trials):
        est = fragset.constant
        for (probs, vals, var), sigma in zip(data, sigmas):
            if sigma == 0.0:
                est += float(probs @ vals)
                continue
            shots = max(int(round(m_total * sigma / total_sigma)), 1)
            counts = rng.multinomial(shots, probs)
            est += float(counts @ vals) / shots
        errors[t] = est - exact
    return float(np.sqrt(np.mean(errors ** 2)))


# ---------------------------------------------------------------------------
# symmetry-shift optimization

@dataclass
class ShiftedOperators:
    """Cached ingredients for fast shifted-lambda evaluations."""

    op: FermionicOperator
    n_electrons: int
    hq: PauliPolynomial
    ne: PauliPolynomial
    ne2: PauliPolynomial

    @classmethod
    def build(cls, op: FermionicOperator, n_electrons: int, hq: PauliPolynomial | None = None):
        ne, ne2 = number_operator_polynomials(op.n_spin_orbitals)
        return cls(op, n_electrons, hq if hq is not None else jordan_wigner(op), ne, ne2)

    def shifted_polynomial(self, s1: float, s2: float) -> PauliPolynomial:
        return self.hq - s1 * self.ne - s2 * self.ne2


def sector_spectral_extremes(H: PauliPolynomial) -> tuple[np.ndarray, np.ndarray]:
    """(E_min, E_max) per electron-count sector; the Hamiltonian is block
    diagonal over these, so shifts move each block uniformly."""
    n = H.n_qubits
    emin = np.empty(n + 1)
    emax = np.empty(n + 1)
    for ne in range(n + 1):
        lo, hi = extremal_eigenvalues(H, SymmetrySector(electron_count=ne))
        emin[ne], emax[ne] = lo, hi
    return emin, emax


def optimal_range_shift(H: PauliPolynomial, n_electrons: int) -> tuple[SymmetryShift, float]:
    """Shift minimizing the full-space spectral range of H - s1 Ne - s2 Ne^2,
    solved exactly as a linear program over per-sector extremes.

    Returns (shift, minimized half range).
    """
    from scipy.optimize import linprog

    emin, emax = sector_spectral_extremes(H)
    nsec = emin.shape[0]
    ns = np.arange(nsec, dtype=float)
    # variables (s1, s2, t_hi, t_lo): minimize t_hi - t_lo subject to
    # t_hi >= Emax_n - s1 n - s2 n^2 and t_lo <= Emin_n - s1 n - s2 n^2
    c = np.array([0.0, 0.0, 1.0, -1.0])
    a_ub = np.zeros((2 * nsec, 4))
    b_ub = np.zeros(2 * nsec)
    a_ub[:nsec, 0] = -ns
    a_ub[:nsec, 1] = -(ns ** 2)
    a_ub[:nsec, 2] = -1.0
    b_ub[:nsec] = -emax
    a_ub[nsec:, 0] = ns
    a_ub[nsec:, 1] = ns ** 2
    a_ub[nsec:, 3] = 1.0
    b_ub[nsec:] = emin
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * 4, method="highs")
    if not res.success:
        raise SymmetryError(f"range-shift LP failed: {res.message}")
    s1, s2 = float(res.x[0]), float(res.x[1])
    half = 0.5 * float(res.fun)
    return SymmetryShift.for_electron_count(0.0, s1, s2, n_electrons), half


def optimize_shift(shifted: ShiftedOperators, objective: str, xtol: float = 1e-6) -> SymmetryShift:
    """Minimize a shifted-cost objective over (s1, s2); 'range' is solved
    exactly via per-sector extremes, the 1-norm objectives by coordinate
    search (Powell) from zero. s0 never affects any objective."""
    from scipy.optimize import minimize

    if objective == "range":
        return optimal_range_shift(shifted.hq, shifted.n_electrons)[0]

    def value(params):
        s1, s2 = params
        if objective == "ac":
            poly = shifted.shifted_polynomial(s1, s2)
            lam, _ = lcu_norm_ac(sorted_insertion(poly, "anticommuting"))
            return lam
        if objective == "lr":
            op = apply_symmetry_shift(shifted.op, SymmetryShift(0.0, s1, s2, 0.0))
            lam, _ = lcu_norm_lr(low_rank_decompose(op, tol=1e-8))
            return lam
        raise ArgumentError(f"unknown shift objective {objective!r}")

    res = minimize(value, np.zeros(2), method="Powell",
                   options=dict(xtol=xtol, ftol=1e-10, maxiter=200))
    s1, s2 = (res.x if res.fun <= value(np.zeros(2)) else np.zeros(2))
    return SymmetryShift.for_electron_count(0.0, float(s1), float(s2), shifted.n_electrons)
