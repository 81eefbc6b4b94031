"""Low-rank decomposition of the two-body tensor, fluid-fragment
repartitioning, LCU-norm bookkeeping, Givens networks, symmetry shifts.

A fermionic fragment is stored in its rotated mode basis: with modes
b_k = sum_q rotation[q, k] a_q, the fragment operator is
sum_k one_body[k] n_k + sum_kl two_body[k, l] n_k n_l.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConsistencyError, OrthogonalityError, SymmetryError
from .integrals import FermionicOperator, SpinOrbitalIntegrals
from .kernels import apply_givens, diag_two_body_values
from .pauli import PauliPolynomial, jordan_wigner

ORTHO_TOL = 1e-10


@dataclass
class FermionFragment:
    """Orbital-rotated polynomial in occupation numbers."""

    rotation: np.ndarray      # (N, N) orthogonal; columns are modes
    one_body: np.ndarray      # (N,) coefficients of n_k
    two_body: np.ndarray      # (N, N) symmetric coefficients of n_k n_l
    index: int = 0

    def __post_init__(self):
        n = self.rotation.shape[0]
        if np.max(np.abs(self.rotation.T @ self.rotation - np.eye(n))) > ORTHO_TOL:
            raise OrthogonalityError("fragment rotation is not orthogonal")

    @property
    def n_spin_orbitals(self) -> int:
        return self.rotation.shape[0]

    def to_tensors(self) -> tuple[np.ndarray, np.ndarray]:
        """(h, g) tensors of the fragment in the original orbital basis."""
        C = self.rotation
        h = np.einsum("pk,k,qk->pq", C, self.one_body, C, optimize=True)
        g = np.einsum("pk,qk,kl,rl,sl->pqrs", C, C, self.two_body, C, C, optimize=True)
        return h, g

    def to_polynomial(self) -> PauliPolynomial:
        h, g = self.to_tensors()
        return jordan_wigner(FermionicOperator(self.n_spin_orbitals, h, g, 0.0))

    def diagonal_values(self, dim: int) -> np.ndarray:
        """Fragment eigenvalue for every occupation bitstring of its modes."""
        return diag_two_body_values(
            np.ascontiguousarray(self.one_body, dtype=np.float64),
            np.ascontiguousarray(self.two_body, dtype=np.float64),
            dim,
        )


@dataclass(frozen=True)
class SymmetryShift:
    """s0 + s1 Ne + s2 Ne^2 with the in-sector eigenvalue recorded."""

    s0: float
    s1: float
    s2: float
    sector_eigenvalue: float

    @classmethod
    def for_electron_count(cls, s0: float, s1: float, s2: float, n_electrons: int):
        return cls(s0, s1, s2, s0 + s1 * n_electrons + s2 * n_electrons ** 2)


def apply_symmetry_shift(op: FermionicOperator, shift: SymmetryShift) -> FermionicOperator:
    """H - (s0 + s1 Ne + s2 Ne^2) as a fermionic operator.

    Ne = sum_p E_pp maps onto the one-body diagonal; Ne^2 onto g_pprr.
    """
    n = op.n_spin_orbitals
    h = op.h.copy()
    h[np.diag_indices(n)] -= shift.s1
    g = op.g.copy() if op.g is not None else np.zeros((n,) * 4)
    ii = np.arange(n)
    g[ii[:, None], ii[:, None], ii[None, :], ii[None, :]] -= shift.s2
    return FermionicOperator(n, h, g, op.e_core - shift.s0)


def number_operator_polynomials(n: int) -> tuple[PauliPolynomial, PauliPolynomial]:
    """(JW image of Ne, JW image of Ne^2); cached by callers that iterate."""
    eye = np.eye(n)
    ne = jordan_wigner(FermionicOperator(n, eye, None, 0.0))
    ii = np.arange(n)
    g = np.zeros((n,) * 4)
    g[ii[:, None], ii[:, None], ii[None, :], ii[None, :]] = 1.0
    ne2 = jordan_wigner(FermionicOperator(n, np.zeros((n, n)), g, 0.0))
    return ne, ne2


# ---------------------------------------------------------------------------
# low-rank decomposition

def low_rank_decompose(ints: SpinOrbitalIntegrals, tol: float = 1e-6) -> list[FermionFragment]:
    """Eigendecompose the (pq),(rs) supermatrix of g into orbital-rotated
    diagonal quadratic fragments; fragment 0 is the one-body part."""
    n = ints.n_spin_orbitals
    sup = ints.g.reshape(n * n, n * n)
    if np.max(np.abs(sup - sup.T)) > 1e-8:
        raise ConsistencyError("two-body supermatrix is not symmetric")
    sup = 0.5 * (sup + sup.T)

    frags = []
    eps1, c1 = np.linalg.eigh(ints.h)
    frags.append(FermionFragment(_fix_det(c1), eps1, np.zeros((n, n)), index=0))

    mu, vecs = np.linalg.eigh(sup)
    order = np.argsort(-np.abs(mu))
    for idx in order:
        if abs(mu[idx]) < tol:
            continue
        L = vecs[:, idx].reshape(n, n)
        L = 0.5 * (L + L.T)
        d, C = np.linalg.eigh(L)
        two = mu[idx] * np.outer(d, d)
        frags.append(FermionFragment(_fix_det(C), np.zeros(n), two, index=len(frags)))
    return frags


def _fix_det(C: np.ndarray) -> np.ndarray:
    """Flip one column sign so the rotation is special-orthogonal; mode
    occupations are insensitive to column signs."""
    if np.linalg.det(C) < 0:
        C = C.copy()
        C[:, 0] = -C[:, 0]
    return C


def reconstruct_tensors(frags: list[FermionFragment]) -> tuple[np.ndarray, np.ndarray]:
    n = frags[0].n_spin_orbitals
    h = np.zeros((n, n))
    g = np.zeros((n,) * 4)
    for f in frags:
        hf, gf = f.to_tensors()
        h += hf
        g += gf
    return h, g


# ---------------------------------------------------------------------------
# Givens networks

@dataclass(frozen=True)
class GivensRotation:
    p: int
    q: int
    angle: float


def givens_decompose(rotation: np.ndarray, drop_tol: float = 1e-12) -> list[GivensRotation]:
    """Adjacent-pair Givens sequence whose product reproduces a
    special-orthogonal matrix within 1e-10; zero-angle rotations dropped."""
    n = rotation.shape[0]
    if np.max(np.abs(rotation.T @ rotation - np.eye(n))) > ORTHO_TOL:
        raise OrthogonalityError("matrix is not orthogonal")
    if np.linalg.det(rotation) < 0:
        raise OrthogonalityError("det -1 rotations are not Givens-representable")
    R = rotation.copy()
    rots: list[GivensRotation] = []
    for j in range(n):
        for i in range(n - 1, j, -1):
            a, b = R[i - 1, j], R[i, j]
            if abs(b) < drop_tol:
                continue
            theta = np.arctan2(b, a)
            c, s = np.cos(theta), np.sin(theta)
            G = np.array([[c, s], [-s, c]])
            R[[i - 1, i], :] = G @ R[[i - 1, i], :]
            rots.append(GivensRotation(i - 1, i, theta))
        # a column that was already zero below the diagonal can leave a -1
        # pivot; a pi rotation with the next row flips it (fixed later or,
        # for the last column, excluded by det +1)
        if R[j, j] < 0 and j + 1 < n:
            R[[j, j + 1], :] = -R[[j, j + 1], :]
            rots.append(GivensRotation(j, j + 1, np.pi))
    if np.max(np.abs(R - np.eye(n))) > 1e-10:
        raise OrthogonalityError("Givens sweep did not reduce matrix to identity")
    return rots


def reassemble_givens(rots: list[GivensRotation], n: int) -> np.ndarray:
    """Inverse of givens_decompose: product reproducing the original matrix."""
    R = np.eye(n)
    for rot in rots:
        c, s = np.cos(rot.angle), np.sin(rot.angle)
        block = np.array([[c, -s], [s, c]])
        R[:, [rot.p, rot.q]] = R[:, [rot.p, rot.q]] @ block
    return R


def rotate_state(psi: np.ndarray, rotation: np.ndarray) -> np.ndarray:
    """Fock-space image of the orbital rotation applied to a dense vector:
    occupation probabilities of the rotated state give fragment mode
    occupations, <psi| f(n-modes) |psi> = <U psi| f(n) |U psi>."""
    rots = givens_decompose(rotation)
    out = psi.astype(np.complex128, copy=True)
    for rot in reversed(rots):
        out = apply_givens(out, rot.p, rot.q, rot.angle)
    return out


# ---------------------------------------------------------------------------
# LCU 1-norm of the low-rank form

def collected_one_body(frags: list[FermionFragment]) -> np.ndarray:
    """One-body matrix after folding every fragment's occupation-linear part
    (its own one-body plus the reflection-substitution row sums) into a
    single operator to be re-diagonalized."""
    n = frags[0].n_spin_orbitals
    h = np.zeros((n, n))
    for f in frags:
        rowsum = f.one_body + f.two_body.sum(axis=1)
        h += np.einsum("pk,k,qk->pq", f.rotation, rowsum, f.rotation, optimize=True)
    return h


def lcu_norm_lr(frags: list[FermionFragment]) -> tuple[float, int]:
    """LCU 1-norm of the low-rank form and the fragment count.

    The collected one-body part contributes half the absolute eigenvalue sum
    (one reflection per mode). Each quadratic fragment is kept as a complete
    square and costed at an eighth of its absolute coefficient sum, which for
    spin-restricted fragments equals a quarter of the coefficient sum over
    spatial mode pairs.
    """
    lam = float(np.abs(np.linalg.eigvalsh(collected_one_body(frags))).sum() / 2.0)
    for f in frags:
        lam += float(np.abs(f.two_body).sum() / 8.0)
    return lam, len(frags)


def _fragment_linear_norm(one_body: np.ndarray, two_body: np.ndarray) -> float:
    """1-norm of the reflection-linear part left inside a fragment."""
    b = one_body / 2.0 + two_body.sum(axis=1) / 2.0
    return float(np.abs(b).sum())


def fragment_resolved_norm(frags: list[FermionFragment]) -> float:
    """1-norm when every fragment keeps its own occupation-linear terms
    (no collection); the Trotter-oriented objective of the fluid optimizer."""
    lam = 0.0
    for f in frags:
        if f.index == 0:
            lam += float(np.abs(f.one_body).sum() / 2.0)
        else:
            off = f.two_body - np.diag(np.diag(f.two_body))
            lam += float(np.abs(off).sum() / 4.0)
            lam += _fragment_linear_norm(f.one_body + np.diag(f.two_body), off)
    return lam


def lr_lcu_optimize(frags: list[FermionFragment]) -> list[FermionFragment]:
    """Reduce the LCU 1-norm by collecting every fragment's occupation-linear
    part into a single re-diagonalized one-body fragment.

    Full collection zeroes each fragment's reflection-linear 1-norm, and by
    the triangle inequality the collected one-body eigenvalue norm never
    exceeds what the scattered parts cost, so the fragment-resolved norm
    cannot increase.
    """
    two = [f for f in frags if f.index != 0]
    if not two:
        return frags
    n = frags[0].n_spin_orbitals
    eps, rot = np.linalg.eigh(collected_one_body(frags))
    out = [FermionFragment(_fix_det(rot), eps, np.zeros((n, n)), index=0)]
    for k, f in enumerate(two):
        off = f.two_body - np.diag(np.diag(f.two_body))
        # what remains of sum_{P!=Q} lam r_P r_Q / 4 in occupation variables
        out.append(FermionFragment(f.rotation, -off.sum(axis=1), off, index=k + 1))
    return out


# ---------------------------------------------------------------------------
# fluid fragments for the measurement objective

def _fragment_statistics(frag: FermionFragment, proxy_dense: np.ndarray):
    """(mean vector of mode occupations, covariance with fragment values,
    occupation covariance, fragment value mean/variance) under the proxy."""
    n = frag.n_spin_orbitals
    dim = proxy_dense.shape[0]
    rho = np.abs(rotate_state(proxy_dense, frag.rotation)) ** 2
    occ = ((np.arange(dim, dtype=np.int64)[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
    v = frag.diagonal_values(dim)
    mean_o = rho @ occ
    mean_v = float(rho @ v)
    cov_vo = (rho * v) @ occ - mean_v * mean_o
    cov_oo = (occ * rho[:, None]).T @ occ - np.outer(mean_o, mean_o)
    var_v = float(rho @ v ** 2 - mean_v ** 2)
    return mean_o, cov_vo, cov_oo, mean_v, var_v


def _one_body_moment_tables(proxy, n: int):
    """T1[PQ] = <E_PQ>, T2[PQ,RS] = <E_PQ E_RS> under a sparse proxy state."""
    from .pauli import excitation_polynomial

    amp = proxy.amplitude_map()
    phis = {}
    for p in range(n):
        for q in range(n):
            out: dict[int, complex] = {}
            for pp, cc in excitation_polynomial(p, q, n):
                for b, a in amp.items():
                    b2, ph = pp.action_on_basis(b)
                    out[b2] = out.get(b2, 0.0) + cc * ph * a
            phis[(p, q)] = out
    t1 = np.zeros((n, n))
    for (p, q), vec in phis.items():
        t1[p, q] = np.real(sum(np.conj(amp.get(b, 0.0)) * a for b, a in vec.items()))
    t2 = np.zeros((n, n, n, n))
    for (p, q), left in phis.items():
        lconj = {b: np.conj(a) for b, a in left.items()}
        for (r, s), right in phis.items():
            t2[q, p, r, s] = np.real(sum(lconj.get(b, 0.0) * a for b, a in right.items()))
    return t1, t2


def f3_repartition(frags: list[FermionFragment], proxy, epsilon: float = 1e-3,
                   maxiter: int = 500) -> tuple[list[FermionFragment], float]:
    """Move occupation-diagonal weight between fragments to minimize the
    optimal-allocation measurement count estimated with the proxy state.

    Returns (repartitioned fragments, measurement count at the optimum).
    """
    from scipy.optimize import minimize

    n = frags[0].n_spin_orbitals
    proxy_dense = proxy.to_dense()
    two = [f for f in frags if f.index != 0]
    m = len(two)
    stats = [_fragment_statistics(f, proxy_dense) for f in two]
    t1, t2 = _one_body_moment_tables(proxy, n)
    h_base = np.einsum(
        "pk,k,qk->pq", frags[0].rotation, frags[0].one_body, frags[0].rotation, optimize=True
    )
    proj = [np.einsum("pk,qk->kpq", f.rotation, f.rotation) for f in two]  # n_k -> E_pq tensor

    floor = 1e-14

    def pieces(cvec):
        c = cvec.reshape(m, n)
        h1 = h_base.copy()
        for k in range(m):
            h1 += np.einsum("kpq,k->pq", proj[k], c[k], optimize=True)
        mean1 = np.einsum("pq,pq->", h1, t1)
        sq = np.einsum("pq,rs,pqrs->", h1, h1, t2, optimize=True)
        var = [max(sq - mean1 ** 2, 0.0)]
        for k, (mean_o, cov_vo, cov_oo, mean_v, var_v) in enumerate(stats):
            var.append(max(var_v - 2.0 * c[k] @ cov_vo + c[k] @ cov_oo @ c[k], 0.0))
        return np.array(var), h1, mean1

    def objective_and_grad(cvec):
        c = cvec.reshape(m, n)
        var, h1, mean1 = pieces(cvec)
        roots = np.sqrt(var + floor)
        total = roots.sum()
        grad = np.zeros((m, n))
        th = np.einsum("pqrs,rs->pq", t2, h1, optimize=True)
        for k in range(m):
            dv1 = 2.0 * (np.einsum("kpq,pq->k", proj[k], th, optimize=True)
                         - mean1 * np.einsum("kpq,pq->k", proj[k], t1, optimize=True))
            _, cov_vo, cov_oo, _, _ = stats[k]
            dvk = -2.0 * cov_vo + 2.0 * cov_oo @ c[k]
            grad[k] = total / roots[0] * dv1 + total / roots[k + 1] * dvk
        return float(total ** 2), grad.ravel()

    c0 = np.zeros(m * n)
    best_c, best_val = c0, objective_and_grad(c0)[0]
    rng = np.random.default_rng(0)
    for start in range(4):
        x0 = c0 if start == 0 else best_c + rng.normal(scale=0.05, size=m * n)
        res = minimize(objective_and_grad, x0, jac=True, method="L-BFGS-B",
                       options=dict(maxiter=maxiter, maxfun=10 * maxiter,
                                    ftol=1e-16, gtol=1e-12))
        if res.fun < best_val:
            best_c, best_val = res.x, float(res.fun)
    c_best = best_c
    m_count = best_val / epsilon ** 2

    c = c_best.reshape(m, n)
    out = []
    h1 = h_base.copy()
    for k in range(m):
        h1 += np.einsum("kpq,k->pq", proj[k], c[k], optimize=True)
    eps_new, rot = np.linalg.eigh(h1)
    out.append(FermionFragment(_fix_det(rot), eps_new, np.zeros((n, n)), index=0))
    for k, f in enumerate(two):
        out.append(FermionFragment(f.rotation, f.one_body - c[k], f.two_body, index=k + 1))
    return out, float(m_count)
