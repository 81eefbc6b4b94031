"""Hot numeric kernels: statevector Pauli application, Givens rotations,
diagonal fragment evaluation.

Each kernel has a numba-jitted implementation and a vectorized pure-numpy
fallback. Set ``QRES_NO_NUMBA=1`` in the environment to force the numpy
path (see ``benchmarks/bench_kernels.py`` for a timing comparison).
"""

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("QRES_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via QRES_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# pure-numpy implementations

def _popcount_np(arr):
    return np.bitwise_count(arr.astype(np.uint64)).astype(np.int64)


def _apply_pauli_terms_np(xs, zs, coeffs, psi, out):
    """out += sum_j coeffs[j] * (X^xs[j] Z^zs[j]) psi   (phases folded into coeffs)."""
    dim = psi.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    for j in range(xs.shape[0]):
        sign = 1.0 - 2.0 * (_popcount_np(idx & zs[j]) & 1)
        np.add.at(out, idx ^ xs[j], coeffs[j] * sign * psi)
    return out


def _zpoly_values_np(zs, coeffs, dim):
    """Diagonal values of an all-z Pauli sum over the full computational basis."""
    idx = np.arange(dim, dtype=np.int64)
    vals = np.zeros(dim, dtype=np.float64)
    for j in range(zs.shape[0]):
        vals += coeffs[j] * (1.0 - 2.0 * (_popcount_np(idx & zs[j]) & 1))
    return vals


def _apply_givens_np(psi, p, q, theta):
    """In-place e^{theta (E_pq - E_qp)} on a dense Fock-space vector (p < q)."""
    dim = psi.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    occ_q = (idx >> q) & 1
    occ_p = (idx >> p) & 1
    sel = (occ_q == 1) & (occ_p == 0)
    b = idx[sel]
    b2 = b ^ ((1 << p) | (1 << q))
    between = ((1 << q) - 1) ^ ((1 << (p + 1)) - 1)
    sign = 1.0 - 2.0 * (_popcount_np(b & between) & 1)
    c, s = np.cos(theta), np.sin(theta)
    u = psi[b2].copy()  # p occupied
    v = psi[b].copy()   # q occupied
    psi[b2] = c * u + sign * s * v
    psi[b] = -sign * s * u + c * v
    return psi


def _diag_two_body_np(lam1, lam2, dim):
    """d(b) = sum_p lam1[p] b_p + sum_pq lam2[p,q] b_p b_q over all basis states."""
    n = lam1.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    occ = ((idx[:, None] >> np.arange(n)[None, :]) & 1).astype(np.float64)
    return occ @ lam1 + np.einsum("bp,pq,bq->b", occ, lam2, occ, optimize=True)


# ---------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _popcount64(v):
        v = v - ((v >> 1) & 0x5555555555555555)
        v = (v & 0x3333333333333333) + ((v >> 2) & 0x3333333333333333)
        v = (v + (v >> 4)) & 0x0F0F0F0F0F0F0F0F
        return (v * 0x0101010101010101) >> 56

    @njit(cache=True)
    def _apply_pauli_terms_nb(xs, zs, coeffs, psi, out):
        dim = psi.shape[0]
        for j in range(xs.shape[0]):
            x = xs[j]
            z = zs[j]
            c = coeffs[j]
            for b in range(dim):
                if _popcount64(b & z) & 1:
                    out[b ^ x] -= c * psi[b]
                else:
                    out[b ^ x] += c * psi[b]
        return out

    @njit(cache=True)
    def _zpoly_values_nb(zs, coeffs, dim):
        vals = np.zeros(dim, dtype=np.float64)
        for j in range(zs.shape[0]):
            z = zs[j]
            c = coeffs[j]
            for b in range(dim):
                if _popcount64(b & z) & 1:
                    vals[b] -= c
                else:
                    vals[b] += c
        return vals

    @njit(cache=True)
    def _apply_givens_nb(psi, p, q, theta):
        dim = psi.shape[0]
        mask = (1 << p) | (1 << q)
        between = ((1 << q) - 1) ^ ((1 << (p + 1)) - 1)
        c = np.cos(theta)
        s = np.sin(theta)
        for b in range(dim):
            if ((b >> q) & 1) == 1 and ((b >> p) & 1) == 0:
                b2 = b ^ mask
                sign = 1.0
                if _popcount64(b & between) & 1:
                    sign = -1.0
                u = psi[b2]
                v = psi[b]
                psi[b2] = c * u + sign * s * v
                psi[b] = -sign * s * u + c * v
        return psi

    @njit(cache=True)
    def _diag_two_body_nb(lam1, lam2, dim):
        n = lam1.shape[0]
        vals = np.zeros(dim, dtype=np.float64)
        for b in range(dim):
            acc = 0.0
            for p in range(n):
                if (b >> p) & 1:
                    acc += lam1[p]
                    for q in range(n):
                        if (b >> q) & 1:
                            acc += lam2[p, q]
            vals[b] = acc
        return vals


# ---------------------------------------------------------------------------
# public bindings

if HAVE_NUMBA:
    apply_pauli_terms = _apply_pauli_terms_nb
    zpoly_values = _zpoly_values_nb
    apply_givens = _apply_givens_nb
    diag_two_body_values = _diag_two_body_nb
else:
    apply_pauli_terms = _apply_pauli_terms_np
    zpoly_values = _zpoly_values_np
    apply_givens = _apply_givens_np
    diag_two_body_values = _diag_two_body_np

IMPLEMENTATION = "numba" if HAVE_NUMBA else "numpy"
