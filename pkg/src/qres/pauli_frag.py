"""Sorted-insertion grouping into fully-commuting or anticommuting fragments,
plus Clifford diagonalizer synthesis for commuting fragments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KindError, StateError
from .pauli import PauliPolynomial, PauliProduct, anticommutes, commutes


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered H/S/CNOT program; earlier gates act on the state first."""

    n_qubits: int
    gates: tuple[tuple, ...] = ()

    def conjugate_pauli(self, p: PauliProduct) -> tuple[PauliProduct, int]:
        """(p', sign) with U p U^dag = sign * p' for the phase-0 input."""
        x, z = p.x, p.z
        sign = 1
        for gate in self.gates:
            kind = gate[0]
            if kind == "H":
                m = 1 << gate[1]
                xb, zb = x & m, z & m
                if xb and zb:
                    sign = -sign
                x = (x & ~m) | (m if zb else 0)
                z = (z & ~m) | (m if xb else 0)
            elif kind == "S":
                m = 1 << gate[1]
                if x & m:
                    if z & m:
                        sign = -sign
                        z &= ~m
                    else:
                        z |= m
            else:  # CNOT
                c, t = 1 << gate[1], 1 << gate[2]
                xc, zc = bool(x & c), bool(z & c)
                xt, zt = bool(x & t), bool(z & t)
                if xc and zt and (xt == zc):
                    sign = -sign
                if xc:
                    x ^= t
                if zt:
                    z ^= c
        return PauliProduct(x, z, p.n_qubits), sign

    def apply_to_state(self, psi: np.ndarray) -> np.ndarray:
        """Dense statevector action, gates in program order."""
        n = self.n_qubits
        psi = psi.astype(np.complex128, copy=True)
        dim = psi.shape[0]
        idx = np.arange(dim)
        for gate in self.gates:
            if gate[0] == "H":
                q = gate[1]
                lo = (idx >> q) & 1 == 0
                a, b = psi[idx[lo]], psi[idx[lo] | (1 << q)]
                s = 1 / np.sqrt(2.0)
                psi[idx[lo]], psi[idx[lo] | (1 << q)] = s * (a + b), s * (a - b)
            elif gate[0] == "S":
                q = gate[1]
                hi = (idx >> q) & 1 == 1
                psi[hi] *= 1j
            else:
                c, t = gate[1], gate[2]
                src = ((idx >> c) & 1 == 1) & ((idx >> t) & 1 == 0)
                a = idx[src]
                b = a | (1 << t)
                psi[a], psi[b] = psi[b].copy(), psi[a].copy()
        return psi

    def gate_counts(self) -> tuple[int, int]:
        one = sum(1 for g in self.gates if g[0] in ("H", "S"))
        two = len(self.gates) - one
        return one, two

    def depth(self) -> int:
        avail = [0] * self.n_qubits
        d = 0
        for g in self.gates:
            qs = g[1:]
            slot = max(avail[q] for q in qs) + 1
            for q in qs:
                avail[q] = slot
            d = max(d, slot)
        return d


@dataclass
class PauliFragment:
    """One measurable/simulable group of Pauli terms."""

    members: list[tuple[PauliProduct, float]]
    kind: str  # 'commuting' | 'anticommuting'
    diagonalizer: CliffordCircuit | None = None

    @property
    def n_qubits(self) -> int:
        return self.members[0][0].n_qubits

    def polynomial(self) -> PauliPolynomial:
        return PauliPolynomial(self.n_qubits, dict(self.members))

    def two_norm(self) -> float:
        return float(np.sqrt(sum(c * c for _, c in self.members)))


@dataclass
class FragmentSet:
    """Ordered fragments plus the constant (identity) part of the operator."""

    fragments: list
    constant: float
    kind: str   # 'commuting' | 'anticommuting' | 'fermionic'
    n_qubits: int

    def __len__(self) -> int:
        return len(self.fragments)

    def __iter__(self):
        return iter(self.fragments)


def _sorted_terms(H: PauliPolynomial) -> list[tuple[PauliProduct, float]]:
    # descending |coefficient|; ties broken on (z, x) as unsigned integers
    return sorted(
        H.terms.items(), key=lambda kv: (-abs(kv[1]), kv[0].z, kv[0].x)
    )


def sorted_insertion(H: PauliPolynomial, kind: str) -> FragmentSet:
    """Greedy grouping: each term joins the first group it fully commutes
    (or anticommutes) with, else opens a new group."""
    if kind not in ("commuting", "anticommuting"):
        raise KindError(f"unknown kind {kind!r}")
    pred = commutes if kind == "commuting" else anticommutes
    constant = H.constant
    groups: list[list[tuple[PauliProduct, float]]] = []
    for p, c in _sorted_terms(H.without_identity()):
        for grp in groups:
            if all(pred(p, q) for q, _ in grp):
                grp.append((p, c))
                break
        else:
            groups.append([(p, c)])
    frags = [PauliFragment(g, kind) for g in groups]
    return FragmentSet(frags, constant, kind, H.n_qubits)


def lcu_norm_ac(fragset: FragmentSet) -> tuple[float, int]:
    """LCU 1-norm and unitary count of an anticommuting grouping."""
    if fragset.kind != "anticommuting":
        raise KindError("lcu_norm_ac requires an anticommuting fragment set")
    lam = sum(f.two_norm() for f in fragset.fragments)
    return float(lam), len(fragset.fragments)


# ---------------------------------------------------------------------------
# Clifford synthesis by symplectic Gaussian elimination

def _independent_generators(members: list[PauliProduct], n: int) -> list[list[int]]:
    """GF(2) row-space basis of the members' (x|z) vectors."""
    pivots: dict[int, int] = {}
    rows: list[int] = []
    for m in members:
        r = (m.x << n) | m.z
        while r:
            msb = r.bit_length() - 1
            if msb in pivots:
                r ^= rows[pivots[msb]]
            else:
                pivots[msb] = len(rows)
                rows.append(r)
                break
    return [[r >> n, r & ((1 << n) - 1)] for r in rows]


def synthesize_diagonalizer(frag: PauliFragment) -> CliffordCircuit:
    """Clifford circuit U with U P U^dag all-z for every member P.

    Symplectic Gaussian elimination over GF(2) on the fragment's independent
    generators, emitting H/S/CNOT gates.
    """
    if frag.kind != "commuting":
        raise KindError("diagonalizer synthesis requires a commuting fragment")
    for i, (p, _) in enumerate(frag.members):
        for q, _ in frag.members[i + 1:]:
            if not commutes(p, q):
                raise KindError("fragment members do not mutually commute")

    n = frag.n_qubits
    gens = _independent_generators([p for p, _ in frag.members], n)
    gates: list[tuple] = []

    def s_gate(q: int):
        gates.append(("S", q))
        for g in gens:
            if g[0] >> q & 1:
                g[1] ^= 1 << q

    def h_gate(q: int):
        gates.append(("H", q))
        m = 1 << q
        for g in gens:
            xb, zb = g[0] & m, g[1] & m
            g[0] = (g[0] & ~m) | (m if zb else 0)
            g[1] = (g[1] & ~m) | (m if xb else 0)

    def cnot_gate(c: int, t: int):
        gates.append(("CNOT", c, t))
        for g in gens:
            if g[0] >> c & 1:
                g[0] ^= 1 << t
            if g[1] >> t & 1:
                g[1] ^= 1 << c

    def cz_gate(a: int, b: int):
        h_gate(b)
        cnot_gate(a, b)
        h_gate(b)

    while True:
        gi = next((i for i, g in enumerate(gens) if g[0]), None)
        if gi is None:
            break
        g = gens[gi]
        q = (g[0] & -g[0]).bit_length() - 1  # lowest set x bit
        # row-reduce so only this generator keeps an x bit on the pivot
        for j, h in enumerate(gens):
            if j != gi and (h[0] >> q) & 1:
                h[0] ^= g[0]
                h[1] ^= g[1]
        if (g[1] >> q) & 1:
            s_gate(q)
        for qp in range(n):
            if qp != q and (g[0] >> qp) & 1:
                if (g[1] >> qp) & 1:
                    s_gate(qp)
                cnot_gate(q, qp)
        if (g[1] >> q) & 1:
            s_gate(q)
        for qp in range(n):
            if qp != q and (g[1] >> qp) & 1:
                cz_gate(q, qp)
        h_gate(q)

    return CliffordCircuit(n, tuple(gates))


def attach_diagonalizers(fragset: FragmentSet) -> FragmentSet:
    """Synthesize and attach a diagonalizer to every commuting fragment."""
    for f in fragset.fragments:
        if f.diagonalizer is None:
            f.diagonalizer = synthesize_diagonalizer(f)
    return fragset


def rotated_z_polynomial(frag: PauliFragment) -> list[tuple[int, float]]:
    """(z_mask, coeff) pairs of U H_frag U^dag, all-z by construction."""
    if frag.diagonalizer is None:
        raise StateError("fragment has no diagonalizer")
    out = []
    for p, c in frag.members:
        p2, sign = frag.diagonalizer.conjugate_pauli(p)
        if not p2.is_all_z:
            raise StateError("conjugated member is not all-z")
        out.append((p2.z, sign * c))
    return out
