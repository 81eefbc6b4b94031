"""STO-3G basis data and contracted-Gaussian bookkeeping.

Exponents and contraction coefficients are the standard published STO-3G
values for H, N, O. Primitives are cartesian Gaussians x^l y^m z^n e^{-a r^2}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGSTROM_TO_BOHR = 1.0 / 0.529177210903

_S_COEF = (0.15432897, 0.53532814, 0.44463454)
_2S_COEF = (-0.09996723, 0.39951283, 0.70011547)
_2P_COEF = (0.15591627, 0.60768372, 0.39195739)

# element -> list of shells (kind, exponents, coefficients)
STO3G = {
    "H": [
        ("s", (3.42525091, 0.62391373, 0.16885540), _S_COEF),
    ],
    "N": [
        ("s", (99.1061690, 18.0523120, 4.8856602), _S_COEF),
        ("s", (3.7804559, 0.8784966, 0.2857144), _2S_COEF),
        ("p", (3.7804559, 0.8784966, 0.2857144), _2P_COEF),
    ],
    "O": [
        ("s", (130.7093200, 23.8088610, 6.4436083), _S_COEF),
        ("s", (5.0331513, 1.1695961, 0.3803890), _2S_COEF),
        ("p", (5.0331513, 1.1695961, 0.3803890), _2P_COEF),
    ],
}

ATOMIC_NUMBER = {"H": 1, "N": 7, "O": 8}


@dataclass(frozen=True)
class BasisFunction:
    """Contracted cartesian Gaussian centered at `center` (bohr)."""

    center: tuple[float, float, float]
    lmn: tuple[int, int, int]
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]  # includes primitive norms and contraction norm


def _primitive_norm(a: float, lmn: tuple[int, int, int]) -> float:
    l, m, n = lmn
    from scipy.special import factorial2

    def df(k):
        return 1.0 if k <= 0 else float(factorial2(k))

    num = (2 * a / np.pi) ** 0.75 * (4 * a) ** ((l + m + n) / 2)
    den = np.sqrt(df(2 * l - 1) * df(2 * m - 1) * df(2 * n - 1))
    return num / den


def _contraction_norm(exps, coefs, lmn) -> float:
    # <phi|phi> for the primitive-normalized contraction
    l, m, n = lmn
    from scipy.special import factorial2

    def df(k):
        return 1.0 if k <= 0 else float(factorial2(k))

    L = l + m + n
    pref = np.pi ** 1.5 * df(2 * l - 1) * df(2 * m - 1) * df(2 * n - 1) / 2.0 ** L
    s = 0.0
    for ai, ci in zip(exps, coefs):
        for aj, cj in zip(exps, coefs):
            s += (
                ci * cj * _primitive_norm(ai, lmn) * _primitive_norm(aj, lmn)
                / (ai + aj) ** (L + 1.5)
            )
    return 1.0 / np.sqrt(pref * s)


def build_basis(atoms: list[tuple[str, tuple[float, float, float]]]) -> list[BasisFunction]:
    """Expand (element, xyz-in-bohr) atoms into contracted basis functions."""
    funcs = []
    for element, xyz in atoms:
        for kind, exps, coefs in STO3G[element]:
            lmns = [(0, 0, 0)] if kind == "s" else [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
            for lmn in lmns:
                cn = _contraction_norm(exps, coefs, lmn)
                normed = tuple(
                    cn * c * _primitive_norm(a, lmn) for a, c in zip(exps, coefs)
                )
                funcs.append(BasisFunction(tuple(xyz), lmn, tuple(exps), normed))
    return funcs


def nuclear_repulsion(atoms: list[tuple[str, tuple[float, float, float]]]) -> float:
    e = 0.0
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            zi, zj = ATOMIC_NUMBER[atoms[i][0]], ATOMIC_NUMBER[atoms[j][0]]
            r = np.linalg.norm(np.array(atoms[i][1]) - np.array(atoms[j][1]))
            e += zi * zj / r
    return float(e)
