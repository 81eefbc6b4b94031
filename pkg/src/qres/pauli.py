"""Symplectic Pauli-product algebra, Jordan-Wigner mapping, expectations.

A Pauli product is stored as a pair of bitmasks (x, z) plus a power of i.
The phase-0 element for given masks is the Hermitian operator
``i^{|x&z|} X^x Z^z`` (one X/Y/Z per set bit, Y where both bits are set).
Polynomials keep phase-normalized products as keys with real coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NormalizationError
from .kernels import apply_pauli_terms

_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_CHAR_BITS = {v: k for k, v in _PAULI_CHARS.items()}

COEFF_CUTOFF = 1e-12


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliProduct:
    """Tensor product of single-qubit Paulis on ``n_qubits`` qubits.

    ``phase_power`` holds the exponent k of an overall i^k; the phase-0
    representative is Hermitian.
    """

    x: int
    z: int
    n_qubits: int
    phase_power: int = 0

    @property
    def phase(self) -> complex:
        return 1j ** (self.phase_power % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliProduct":
        return cls(0, 0, n_qubits)

    @classmethod
    def from_string(cls, s: str) -> "PauliProduct":
        x = z = 0
        for q, ch in enumerate(s):
            xb, zb = _CHAR_BITS[ch]
            x |= xb << q
            z |= zb << q
        return cls(x, z, len(s))

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> "PauliProduct":
        xb, zb = _CHAR_BITS[kind]
        return cls(xb << qubit, zb << qubit, n_qubits)

    def to_string(self) -> str:
        return "".join(
            _PAULI_CHARS[((self.x >> q) & 1, (self.z >> q) & 1)] for q in range(self.n_qubits)
        )

    def __str__(self) -> str:
        pre = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase_power % 4]
        return pre + self.to_string()

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_all_z(self) -> bool:
        return self.x == 0

    def hermitian_key(self) -> "PauliProduct":
        """Phase-0 representative with the same bitmasks."""
        if self.phase_power % 4 == 0:
            return self
        return PauliProduct(self.x, self.z, self.n_qubits)

    def action_on_basis(self, b: int) -> tuple[int, complex]:
        """Return (b', amp) with P|b> = amp |b'>."""
        amp = self.phase * (1j ** self.y_count)
        if _popcount(self.z & b) & 1:
            amp = -amp
        return b ^ self.x, amp

    def matrix(self) -> np.ndarray:
        """Dense matrix; only sensible for small qubit counts."""
        dim = 1 << self.n_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for b in range(dim):
            b2, amp = self.action_on_basis(b)
            m[b2, b] = amp
        return m


def multiply(a: PauliProduct, b: PauliProduct) -> PauliProduct:
    """Phase-exact product a*b."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    x = a.x ^ b.x
    z = a.z ^ b.z
    y12 = _popcount(x & z)
    k = (
        a.phase_power
        + b.phase_power
        + a.y_count
        + b.y_count
        - y12
        + 2 * _popcount(a.z & b.x)
    ) % 4
    return PauliProduct(x, z, a.n_qubits, k)


def commutes(a: PauliProduct, b: PauliProduct) -> bool:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


def anticommutes(a: PauliProduct, b: PauliProduct) -> bool:
    return not commutes(a, b)


class PauliPolynomial:
    """Real-coefficient sum of phase-normalized Pauli products.

    Immutable after construction; keys always have phase_power 0.
    """

    __slots__ = ("n_qubits", "terms", "_arrays")

    def __init__(self, n_qubits: int, terms: dict[PauliProduct, float] | None = None):
        self.n_qubits = n_qubits
        clean: dict[PauliProduct, float] = {}
        if terms:
            for p, c in terms.items():
                if p.phase_power % 4 != 0:
                    raise ValueError("polynomial keys must be phase-normalized")
                if abs(c) >= COEFF_CUTOFF:
                    clean[p] = float(c)
        self.terms = clean
        self._arrays = None

    @classmethod
    def from_complex_accumulator(
        cls, n_qubits: int, acc: dict[tuple[int, int], complex], imag_tol: float = 1e-10
    ) -> "PauliPolynomial":
        terms = {}
        for (x, z), c in acc.items():
            if abs(c.imag) > imag_tol:
                raise ValueError(f"non-Hermitian accumulation: imag={c.imag:.3e}")
            if abs(c.real) >= COEFF_CUTOFF:
                terms[PauliProduct(x, z, n_qubits)] = c.real
        return cls(n_qubits, terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def coefficient(self, p: PauliProduct) -> float:
        return self.terms.get(p.hermitian_key(), 0.0)

    @property
    def constant(self) -> float:
        return self.terms.get(PauliProduct.identity(self.n_qubits), 0.0)

    def without_identity(self) -> "PauliPolynomial":
        ident = PauliProduct.identity(self.n_qubits)
        return PauliPolynomial(self.n_qubits, {p: c for p, c in self.terms.items() if p != ident})

    def __add__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        if self.n_qubits != other.n_qubits:
            raise DimensionError("qubit counts differ")
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, 0.0) + c
        return PauliPolynomial(self.n_qubits, out)

    def __sub__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "PauliPolynomial":
        return PauliPolynomial(self.n_qubits, {p: c * scalar for p, c in self.terms.items()})

    __rmul__ = __mul__

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(xs, zs, coeffs) with i^{y} phases folded into complex coeffs."""
        if self._arrays is None:
            n = len(self.terms)
            xs = np.empty(n, dtype=np.int64)
            zs = np.empty(n, dtype=np.int64)
            cs = np.empty(n, dtype=np.complex128)
            for j, (p, c) in enumerate(self.terms.items()):
                xs[j] = p.x
                zs[j] = p.z
                cs[j] = c * (1j ** p.y_count)
            self._arrays = (xs, zs, cs)
        return self._arrays

    def apply_dense(self, psi: np.ndarray) -> np.ndarray:
        xs, zs, cs = self.arrays()
        out = np.zeros_like(psi)
        apply_pauli_terms(xs, zs, cs, psi, out)
        return out

    def apply_sparse(self, amp_map: dict[int, complex]) -> dict[int, complex]:
        out: dict[int, complex] = {}
        for p, c in self.terms.items():
            for b, a in amp_map.items():
                b2, ph = p.action_on_basis(b)
                out[b2] = out.get(b2, 0.0) + c * ph * a
        return out

    def matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for p, c in self.terms.items():
            for b in range(dim):
                b2, amp = p.action_on_basis(b)
                m[b2, b] += c * amp
        return m

    def conjugated_by_pauli(self, p: PauliProduct, theta: float) -> "PauliPolynomial":
        """e^{i theta P} H e^{-i theta P} for involutory Hermitian P."""
        cos2, sin2 = np.cos(2 * theta), np.sin(2 * theta)
        acc: dict[tuple[int, int], complex] = {}
        for q, c in self.terms.items():
            if commutes(p, q):
                key = (q.x, q.z)
                acc[key] = acc.get(key, 0.0) + c
            else:
                key = (q.x, q.z)
                acc[key] = acc.get(key, 0.0) + c * cos2
                prod = multiply(q, p)
                key2 = (prod.x, prod.z)
                acc[key2] = acc.get(key2, 0.0) - 1j * sin2 * c * prod.phase
        return PauliPolynomial.from_complex_accumulator(self.n_qubits, acc)

    def square(self) -> "PauliPolynomial":
        """H*H for Hermitian H (result Hermitian)."""
        items = list(self.terms.items())
        acc: dict[tuple[int, int], complex] = {}
        for i, (p, cp) in enumerate(items):
            for q, cq in items:
                prod = multiply(p, q)
                key = (prod.x, prod.z)
                acc[key] = acc.get(key, 0.0) + cp * cq * prod.phase
        return PauliPolynomial.from_complex_accumulator(self.n_qubits, acc)

    def to_lines(self) -> str:
        """Textual form, one `coeff  pauli-string` per line."""
        rows = sorted(self.terms.items(), key=lambda kv: (kv[0].z, kv[0].x))
        return "\n".join(f"{c:.16g} {p.to_string()}" for p, c in rows)

    @classmethod
    def from_lines(cls, text: str) -> "PauliPolynomial":
        terms = {}
        n = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            coeff, pstr = line.split()
            p = PauliProduct.from_string(pstr)
            n = p.n_qubits
            terms[p] = terms.get(p, 0.0) + float(coeff)
        if n is None:
            raise ValueError("empty polynomial text")
        return cls(n, terms)


# ---------------------------------------------------------------------------
# Jordan-Wigner

def _jw_ladder(p: int, n: int, dagger: bool) -> list[tuple[PauliProduct, complex]]:
    """a_p (or a+_p) as (x_p -+ i y_p)/2 with the z-parity tail below qubit p."""
    tail = (1 << p) - 1
    xp = PauliProduct(1 << p, tail, n)
    yp = PauliProduct(1 << p, tail | (1 << p), n)
    s = -1.0 if dagger else 1.0
    return [(xp, 0.5), (yp, 0.5j * s)]


_EXCITATION_CACHE: dict[tuple[int, int, int], list[tuple[PauliProduct, complex]]] = {}


def excitation_polynomial(p: int, q: int, n: int) -> list[tuple[PauliProduct, complex]]:
    """Jordan-Wigner image of a+_p a_q as (product, complex coeff) pairs."""
    key = (p, q, n)
    cached = _EXCITATION_CACHE.get(key)
    if cached is not None:
        return cached
    acc: dict[PauliProduct, complex] = {}
    for pa, ca in _jw_ladder(p, n, dagger=True):
        for pb, cb in _jw_ladder(q, n, dagger=False):
            prod = multiply(pa, pb)
            herm = prod.hermitian_key()
            acc[herm] = acc.get(herm, 0.0) + ca * cb * prod.phase
    out = [(pp, cc) for pp, cc in acc.items() if abs(cc) > 0]
    _EXCITATION_CACHE[key] = out
    return out


def jordan_wigner(ferm) -> PauliPolynomial:
    """Map a fermionic operator (h, g tensors + constant) to a PauliPolynomial.

    Occupation maps to bit value 1; spin-orbital p is qubit p.
    """
    n = ferm.n_spin_orbitals
    acc: dict[tuple[int, int], complex] = {}
    if ferm.e_core:
        acc[(0, 0)] = complex(ferm.e_core)

    h = ferm.h
    g = ferm.g
    for p in range(n):
        for q in range(n):
            c = h[p, q]
            if abs(c) < COEFF_CUTOFF:
                continue
            for pp, cc in excitation_polynomial(p, q, n):
                key = (pp.x, pp.z)
                acc[key] = acc.get(key, 0.0) + c * cc

    if g is not None:
        nz = np.argwhere(np.abs(g) >= COEFF_CUTOFF)
        for p, q, r, s in nz:
            c = g[p, q, r, s]
            left = excitation_polynomial(int(p), int(q), n)
            right = excitation_polynomial(int(r), int(s), n)
            for pa, ca in left:
                for pb, cb in right:
                    prod = multiply(pa, pb)
                    key = (prod.x, prod.z)
                    acc[key] = acc.get(key, 0.0) + c * ca * cb * prod.phase

    return PauliPolynomial.from_complex_accumulator(n, acc)


# ---------------------------------------------------------------------------
# expectation values

def _check_normalized(state) -> None:
    nrm = state.norm()
    if abs(nrm - 1.0) > 1e-10:
        raise NormalizationError(f"state norm {nrm} != 1")


def expectation(H: PauliPolynomial, state) -> float:
    """<psi|H|psi> for a normalized WaveVector."""
    _check_normalized(state)
    amp = state.amplitude_map()
    out = H.apply_sparse(amp)
    val = sum(a.conjugate() * out.get(b, 0.0) for b, a in amp.items())
    return float(np.real(val))


def variance(H: PauliPolynomial, state) -> float:
    """Var_psi(H), clamped at zero against roundoff."""
    _check_normalized(state)
    amp = state.amplitude_map()
    hpsi = H.apply_sparse(amp)
    e = np.real(sum(a.conjugate() * hpsi.get(b, 0.0) for b, a in amp.items()))
    h2 = np.real(sum(v.conjugate() * v for v in hpsi.values()))
    var = float(h2 - e * e)
    if var < -1e-12:
        raise ValueError(f"variance {var} below tolerance")
    return max(var, 0.0)
