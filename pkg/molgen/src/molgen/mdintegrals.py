"""Molecular integrals over contracted cartesian Gaussians
(McMurchie-Davidson scheme: Hermite expansion + Boys-function auxiliaries)."""

from __future__ import annotations

import numpy as np
from scipy.special import hyp1f1

from .basis import ATOMIC_NUMBER, BasisFunction


def boys(n: int, x: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_coefs(i: int, j: int, a: float, b: float, AB: float) -> np.ndarray:
    """E_t^{ij} for t = 0..i+j along one cartesian direction."""
    p = a + b
    mu = a * b / p
    E = np.zeros((i + 1, j + 1, i + j + 1))
    E[0, 0, 0] = np.exp(-mu * AB * AB)
    PA = -b * AB / p  # P - A with AB = A - B
    PB = a * AB / p   # P - B
    for ii in range(i + 1):
        for jj in range(j + 1):
            if ii == 0 and jj == 0:
                continue
            if jj == 0:
                for t in range(ii + jj + 1):
                    val = PA * E[ii - 1, 0, t]
                    if t > 0:
                        val += E[ii - 1, 0, t - 1] / (2 * p)
                    if t + 1 <= ii - 1 + jj:
                        val += (t + 1) * E[ii - 1, 0, t + 1]
                    E[ii, 0, t] = val
            else:
                for t in range(ii + jj + 1):
                    val = PB * E[ii, jj - 1, t]
                    if t > 0:
                        val += E[ii, jj - 1, t - 1] / (2 * p)
                    if t + 1 <= ii + jj - 1:
                        val += (t + 1) * E[ii, jj - 1, t + 1]
                    E[ii, jj, t] = val
    return E[i, j, :]


def _overlap_1d(i, j, a, b, AB):
    return hermite_coefs(i, j, a, b, AB)[0]


def overlap_prim(a, lmn1, A, b, lmn2, B):
    p = a + b
    s = (np.pi / p) ** 1.5
    for k in range(3):
        s *= _overlap_1d(lmn1[k], lmn2[k], a, b, A[k] - B[k])
    return s


def kinetic_prim(a, lmn1, A, b, lmn2, B):
    l2, m2, n2 = lmn2

    def s_shift(dk, k):
        lmn = list(lmn2)
        lmn[k] += dk
        if lmn[k] < 0:
            return 0.0
        return overlap_prim(a, lmn1, A, b, tuple(lmn), B)

    t = 0.0
    for k, lk in enumerate(lmn2):
        t += b * (2 * lk + 1) * s_shift(0, k)
        t -= 2 * b * b * s_shift(2, k)
        if lk >= 2:
            t -= 0.5 * lk * (lk - 1) * s_shift(-2, k)
    return t


def hermite_aux(tmax, umax, vmax, p, PC):
    """R^0_{tuv} table via downward Boys recursion."""
    nmax = tmax + umax + vmax
    x = p * float(np.dot(PC, PC))
    F = np.array([boys(n, x) for n in range(nmax + 1)])
    R = np.zeros((nmax + 1, tmax + 1, umax + 1, vmax + 1))
    for n in range(nmax + 1):
        R[n, 0, 0, 0] = (-2.0 * p) ** n * F[n]
    for t in range(tmax + 1):
        for u in range(umax + 1):
            for v in range(vmax + 1):
                if t == u == v == 0:
                    continue
                for n in range(nmax - (t + u + v) + 1):
                    if t > 0:
                        val = PC[0] * R[n + 1, t - 1, u, v]
                        if t > 1:
                            val += (t - 1) * R[n + 1, t - 2, u, v]
                    elif u > 0:
                        val = PC[1] * R[n + 1, t, u - 1, v]
                        if u > 1:
                            val += (u - 1) * R[n + 1, t, u - 2, v]
                    else:
                        val = PC[2] * R[n + 1, t, u, v - 1]
                        if v > 1:
                            val += (v - 1) * R[n + 1, t, u, v - 2]
                    R[n, t, u, v] = val
    return R[0]


def nuclear_prim(a, lmn1, A, b, lmn2, B, C):
    p = a + b
    P = (a * np.asarray(A) + b * np.asarray(B)) / p
    Ex = hermite_coefs(lmn1[0], lmn2[0], a, b, A[0] - B[0])
    Ey = hermite_coefs(lmn1[1], lmn2[1], a, b, A[1] - B[1])
    Ez = hermite_coefs(lmn1[2], lmn2[2], a, b, A[2] - B[2])
    R = hermite_aux(len(Ex) - 1, len(Ey) - 1, len(Ez) - 1, p, P - np.asarray(C))
    val = 0.0
    for t in range(len(Ex)):
        for u in range(len(Ey)):
            for v in range(len(Ez)):
                val += Ex[t] * Ey[u] * Ez[v] * R[t, u, v]
    return 2.0 * np.pi / p * val


def eri_prim(a, lmn1, A, b, lmn2, B, c, lmn3, C, d, lmn4, D):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = (a * np.asarray(A) + b * np.asarray(B)) / p
    Q = (c * np.asarray(C) + d * np.asarray(D)) / q
    E1 = [hermite_coefs(lmn1[k], lmn2[k], a, b, A[k] - B[k]) for k in range(3)]
    E2 = [hermite_coefs(lmn3[k], lmn4[k], c, d, C[k] - D[k]) for k in range(3)]
    n1 = [len(e) - 1 for e in E1]
    n2 = [len(e) - 1 for e in E2]
    R = hermite_aux(n1[0] + n2[0], n1[1] + n2[1], n1[2] + n2[2], alpha, P - Q)
    val = 0.0
    for t in range(n1[0] + 1):
        for u in range(n1[1] + 1):
            for v in range(n1[2] + 1):
                e1 = E1[0][t] * E1[1][u] * E1[2][v]
                if e1 == 0.0:
                    continue
                for tt in range(n2[0] + 1):
                    for uu in range(n2[1] + 1):
                        for vv in range(n2[2] + 1):
                            e2 = E2[0][tt] * E2[1][uu] * E2[2][vv]
                            if e2 == 0.0:
                                continue
                            sign = (-1.0) ** (tt + uu + vv)
                            val += e1 * e2 * sign * R[t + tt, u + uu, v + vv]
    return 2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q)) * val


def _contract2(f, bf1: BasisFunction, bf2: BasisFunction, *args):
    val = 0.0
    for a, ca in zip(bf1.exponents, bf1.coefficients):
        for b, cb in zip(bf2.exponents, bf2.coefficients):
            val += ca * cb * f(a, bf1.lmn, bf1.center, b, bf2.lmn, bf2.center, *args)
    return val


def overlap_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    S = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            S[i, j] = S[j, i] = _contract2(overlap_prim, basis[i], basis[j])
    return S


def kinetic_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    T = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            T[i, j] = T[j, i] = _contract2(kinetic_prim, basis[i], basis[j])
    return T


def nuclear_matrix(basis: list[BasisFunction], atoms) -> np.ndarray:
    n = len(basis)
    V = np.zeros((n, n))
    for element, xyz in atoms:
        z = ATOMIC_NUMBER[element]
        for i in range(n):
            for j in range(i + 1):
                v = _contract2(nuclear_prim, basis[i], basis[j], np.asarray(xyz))
                V[i, j] -= z * v
                if i != j:
                    V[j, i] -= z * v
    return V


def eri_tensor(basis: list[BasisFunction]) -> np.ndarray:
    """Chemists' (ij|kl) with full 8-fold symmetry."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    done = np.zeros((n, n, n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if (i, j) < (k, l):
                        continue
                    if done[i, j, k, l]:
                        continue
                    val = 0.0
                    b1, b2, b3, b4 = basis[i], basis[j], basis[k], basis[l]
                    for a, ca in zip(b1.exponents, b1.coefficients):
                        for b, cb in zip(b2.exponents, b2.coefficients):
                            for c, cc in zip(b3.exponents, b3.coefficients):
                                for d, cd in zip(b4.exponents, b4.coefficients):
                                    val += ca * cb * cc * cd * eri_prim(
                                        a, b1.lmn, b1.center, b, b2.lmn, b2.center,
                                        c, b3.lmn, b3.center, d, b4.lmn, b4.center,
                                    )
                    for (ii, jj) in ((i, j), (j, i)):
                        for (kk, ll) in ((k, l), (l, k)):
                            eri[ii, jj, kk, ll] = val
                            eri[kk, ll, ii, jj] = val
                            done[ii, jj, kk, ll] = done[kk, ll, ii, jj] = True
    return eri
