"""Reference and proxy wavefunctions, sparse exact eigensolver, symmetry
discovery, sector projection, overlaps.

Basis convention: computational basis index b has bit p equal to the
occupation of spin-orbital p (1 = occupied); string renderings list qubit 0
leftmost, so hf_state(4, 2) prints as |1100>.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ArgumentError, DimensionError, SolverError, SymmetryError
from .pauli import PauliPolynomial, PauliProduct

DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class WaveVector:
    """Sparse amplitude map over N-qubit computational basis states."""

    n_qubits: int
    indices: np.ndarray   # int64, sorted ascending
    amplitudes: np.ndarray  # complex128

    @classmethod
    def from_map(cls, n_qubits: int, amp: dict[int, complex], cutoff: float = 1e-14):
        items = sorted((b, a) for b, a in amp.items() if abs(a) > cutoff)
        idx = np.array([b for b, _ in items], dtype=np.int64)
        amps = np.array([a for _, a in items], dtype=np.complex128)
        return cls(n_qubits, idx, amps)

    @classmethod
    def from_dense(cls, psi: np.ndarray, cutoff: float = 1e-14):
        n = int(np.log2(psi.shape[0]))
        nz = np.nonzero(np.abs(psi) > cutoff)[0]
        return cls(n, nz.astype(np.int64), psi[nz].astype(np.complex128))

    @classmethod
    def basis_state(cls, n_qubits: int, index: int):
        return cls(n_qubits, np.array([index], dtype=np.int64),
                   np.array([1.0 + 0j], dtype=np.complex128))

    def to_dense(self) -> np.ndarray:
        psi = np.zeros(1 << self.n_qubits, dtype=np.complex128)
        psi[self.indices] = self.amplitudes
        return psi

    def amplitude_map(self) -> dict[int, complex]:
        return {int(b): complex(a) for b, a in zip(self.indices, self.amplitudes)}

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "WaveVector":
        return WaveVector(self.n_qubits, self.indices, self.amplitudes / self.norm())

    def overlap(self, other: "WaveVector") -> complex:
        """<self|other>."""
        if self.n_qubits != other.n_qubits:
            raise DimensionError("qubit counts differ")
        amap = self.amplitude_map()
        val = sum(np.conj(amap.get(int(b), 0.0)) * a
                  for b, a in zip(other.indices, other.amplitudes))
        return complex(val)

    def __len__(self) -> int:
        return len(self.indices)


def hf_state(n_qubits: int, n_electrons: int) -> WaveVector:
    """Single determinant occupying the lowest-index n_electrons spin-orbitals."""
    if n_electrons > n_qubits or n_electrons < 0:
        raise DimensionError(f"{n_electrons} electrons in {n_qubits} spin-orbitals")
    return WaveVector.basis_state(n_qubits, (1 << n_electrons) - 1)


# ---------------------------------------------------------------------------
# symmetry sectors

@dataclass(frozen=True)
class SymmetrySector:
    """Quantum numbers selecting a subspace: optional electron count plus
    all-z Pauli symmetries with fixed +-1 eigenvalues."""

    generators: tuple[PauliProduct, ...] = ()
    eigenvalues: tuple[int, ...] = ()
    electron_count: int | None = None

    def __post_init__(self):
        for g in self.generators:
            if not g.is_all_z:
                raise ArgumentError("sector generators must be all-z Pauli products")
        if len(self.generators) != len(self.eigenvalues):
            raise ArgumentError("one eigenvalue per generator required")


def sector_basis(n_qubits: int, sector: SymmetrySector | None) -> np.ndarray:
    """Sorted basis indices satisfying the sector constraints."""
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    keep = np.ones(idx.shape[0], dtype=bool)
    if sector is None:
        return idx
    pops = np.bitwise_count(idx.astype(np.uint64)).astype(np.int64)
    if sector.electron_count is not None:
        keep &= pops == sector.electron_count
    for g, e in zip(sector.generators, sector.eigenvalues):
        par = np.bitwise_count((idx & g.z).astype(np.uint64)).astype(np.int64) & 1
        keep &= (1 - 2 * par) == e
    return idx[keep]


def build_matrix(H: PauliPolynomial, basis: np.ndarray) -> sp.csr_matrix:
    """Matrix of H projected onto the given (sorted) basis index set."""
    dims = basis.shape[0]
    rows, cols, data = [], [], []
    col_pos = np.arange(dims)
    for p, c in H.terms.items():
        targets = basis ^ p.x
        pos = np.searchsorted(basis, targets)
        pos = np.clip(pos, 0, dims - 1)
        valid = basis[pos] == targets
        if not valid.any():
            continue
        par = np.bitwise_count((basis[valid] & p.z).astype(np.uint64)).astype(np.int64) & 1
        amp = c * (1j ** p.y_count) * (1.0 - 2.0 * par)
        rows.append(pos[valid])
        cols.append(col_pos[valid])
        data.append(amp)
    if not rows:
        return sp.csr_matrix((dims, dims), dtype=np.complex128)
    m = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dims, dims), dtype=np.complex128,
    )
    return m.tocsr()


def find_pauli_symmetries(members: list[PauliProduct]) -> list[PauliProduct]:
    """Generating set of the GF(2) kernel: Pauli products commuting with
    every member. Identity excluded."""
    if not members:
        return []
    n = members[0].n_qubits
    # symmetry v=(sx,sz) must satisfy parity(sx & z_m) + parity(sz & x_m) = 0
    rows = [(m.z << n) | m.x for m in members]
    # eliminate to row echelon form over GF(2)
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            msb = r.bit_length() - 1
            if msb in pivots:
                r ^= pivots[msb]
            else:
                pivots[msb] = r
                break
    pivot_cols = set(pivots.keys())
    basis_vecs = []
    for free in range(2 * n):
        if free in pivot_cols:
            continue
        v = 1 << free
        # echelon rows only reach bits at or below their pivot, so fixing
        # pivot bits in ascending order settles each row exactly once
        for col in sorted(pivots):
            row = pivots[col]
            if bin(v & row).count("1") % 2:
                v ^= 1 << col
        basis_vecs.append(v)
    out = []
    for v in basis_vecs:
        sx = v >> n
        sz = v & ((1 << n) - 1)
        if sx == 0 and sz == 0:
            continue
        out.append(PauliProduct(sx, sz, n))
    out.sort(key=lambda p: (p.x, p.z))
    return out


def sector_from_symmetries(
    symmetries: list[PauliProduct], reference: WaveVector, electron_count: int | None = None
) -> SymmetrySector:
    """Fix sector eigenvalues by evaluating all-z symmetries on a basis-state
    reference; non-diagonal symmetries have zero expectation and are dropped."""
    ref_index = int(reference.indices[np.argmax(np.abs(reference.amplitudes))])
    gens, eigs = [], []
    for g in symmetries:
        if not g.is_all_z or g.is_identity:
            continue
        par = bin(ref_index & g.z).count("1") & 1
        gens.append(g)
        eigs.append(1 - 2 * par)
    return SymmetrySector(tuple(gens), tuple(eigs), electron_count)


# ---------------------------------------------------------------------------
# eigensolver

def _scatter(basis: np.ndarray, col: np.ndarray, n_qubits: int) -> WaveVector:
    nz = np.nonzero(np.abs(col) > 1e-14)[0]
    return WaveVector(n_qubits, basis[nz].astype(np.int64), col[nz].astype(np.complex128))


def eigensolve(
    H: PauliPolynomial,
    k: int = 1,
    sector: SymmetrySector | None = None,
    method: str = "auto",
) -> list[tuple[float, WaveVector]]:
    """Lowest-k eigenpairs of H, optionally within a symmetry sector.

    method: 'auto' uses dense diagonalization for small projected spaces and
    a restarted Lanczos otherwise; 'dense'/'sparse' force a path.
    """
    if k < 1:
        raise ArgumentError("k must be >= 1")
    basis = sector_basis(H.n_qubits, sector)
    dim = basis.shape[0]
    if k >= dim:
        k = dim
    mat = build_matrix(H, basis)
    use_dense = method == "dense" or (method == "auto" and dim <= 1024)

    if use_dense:
        dense = mat.toarray()
        vals, vecs = np.linalg.eigh(dense)
        return [(float(vals[i]), _scatter(basis, vecs[:, i], H.n_qubits)) for i in range(k)]

    ncv = max(2 * k + 1, 24)
    v0 = np.ones(dim) / np.sqrt(dim)
    last_exc = None
    for attempt in range(5):
        try:
            vals, vecs = spla.eigsh(mat, k=k, which="SA", ncv=min(ncv, dim - 1),
                                    v0=v0, maxiter=4000 * (attempt + 1), tol=1e-12)
        except (spla.ArpackNoConvergence, spla.ArpackError) as exc:  # pragma: no cover
            last_exc = exc
            ncv = min(2 * ncv, dim - 1)
            continue
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        resid = [np.linalg.norm(mat @ vecs[:, i] - vals[i] * vecs[:, i]) for i in range(k)]
        if max(resid) <= 1e-8:
            return [(float(vals[i]), _scatter(basis, vecs[:, i], H.n_qubits)) for i in range(k)]
        ncv = min(2 * ncv, dim - 1)
        last_exc = RuntimeError(f"residuals {max(resid):.2e} above 1e-8")
    raise SolverError(f"eigensolver failed after 5 restarts: {last_exc}")


def extremal_eigenvalues(H: PauliPolynomial, sector: SymmetrySector | None = None) -> tuple[float, float]:
    """(E_min, E_max) of H, exact for small spaces, Lanczos otherwise."""
    basis = sector_basis(H.n_qubits, sector)
    dim = basis.shape[0]
    mat = build_matrix(H, basis)
    if dim <= 4096:
        vals = np.linalg.eigvalsh(mat.toarray())
        return float(vals[0]), float(vals[-1])
    v0 = np.ones(dim) / np.sqrt(dim)
    lo = spla.eigsh(mat, k=1, which="SA", v0=v0, tol=1e-10, maxiter=10000,
                    return_eigenvectors=False)
    hi = spla.eigsh(mat, k=1, which="LA", v0=v0, tol=1e-10, maxiter=10000,
                    return_eigenvectors=False)
    return float(lo[0]), float(hi[0])


# ---------------------------------------------------------------------------
# CISD

@dataclass(frozen=True)
class CisdResult:
    state: WaveVector          # truncated + renormalized proxy
    energy: float              # untruncated CISD variational energy
    error: float | None        # energy - E0, when E0 was supplied
    kept_weight: float         # squared norm captured by kept determinants


def _spin_counts(det: int, n_qubits: int) -> tuple[int, int]:
    alpha = det & int("01" * (n_qubits // 2), 2)
    beta = det & int("10" * (n_qubits // 2), 2)
    return bin(alpha).count("1"), bin(beta).count("1")


def cisd_determinants(n_qubits: int, reference: int) -> np.ndarray:
    """Reference plus all spin-preserving single and double excitations."""
    na, nb = _spin_counts(reference, n_qubits)
    alpha_orbs = list(range(0, n_qubits, 2))
    beta_orbs = list(range(1, n_qubits, 2))
    dets = set()
    for occ_a in combinations(alpha_orbs, na):
        for occ_b in combinations(beta_orbs, nb):
            d = 0
            for p in occ_a + occ_b:
                d |= 1 << p
            if bin(d ^ reference).count("1") <= 4:
                dets.add(d)
    return np.array(sorted(dets), dtype=np.int64)


def cisd_state(
    H: PauliPolynomial,
    n_electrons: int,
    e0: float | None = None,
    keep_weight: float = 0.9999,
) -> CisdResult:
    """Diagonalize H in the singles+doubles space of the HF determinant,
    truncate the lowest eigenvector to the fewest determinants holding
    >= keep_weight of squared norm, and renormalize."""
    ref = (1 << n_electrons) - 1
    basis = cisd_determinants(H.n_qubits, ref)
    mat = build_matrix(H, basis).toarray()
    vals, vecs = np.linalg.eigh(mat)
    # lowest eigenvector reachable from the reference: states with exactly
    # zero HF component live in other symmetry sectors and an iterative
    # solve seeded at HF can never converge to them
    iref = int(np.searchsorted(basis, ref))
    root = 0
    while root < len(vals) - 1 and abs(vecs[iref, root]) < 1e-10:
        root += 1
    energy = float(vals[root])
    vec = vecs[:, root]

    probs = np.abs(vec) ** 2
    order = np.argsort(probs)[::-1]
    cum = np.cumsum(probs[order])
    ncut = min(int(np.searchsorted(cum, keep_weight) + 1), len(order))
    keep = order[:ncut]
    kept_weight = float(cum[ncut - 1])
    amps = vec[keep] / np.sqrt(probs[order][:ncut].sum())
    sub = np.argsort(basis[keep])
    state = WaveVector(H.n_qubits, basis[keep][sub].astype(np.int64),
                       amps[sub].astype(np.complex128))
    err = None if e0 is None else energy - e0
    return CisdResult(state, energy, err, kept_weight)


# ---------------------------------------------------------------------------
# overlaps

def overlap_sum(phi: WaveVector, eigenpairs: list[tuple[float, WaveVector]], eps: float) -> float:
    """Sum of |<psi_k|phi>|^2 over eigenstates within eps of the ground energy,
    extended through any degenerate block straddling the cutoff."""
    if not eigenpairs:
        raise ArgumentError("eigenpair list is empty")
    if eps < 0:
        raise ArgumentError("eps must be >= 0")
    e0 = eigenpairs[0][0]
    total = 0.0
    prev_included_energy = None
    for e, psi in eigenpairs:
        inside = (e - e0) <= eps
        degenerate_tail = (
            prev_included_energy is not None and abs(e - prev_included_energy) <= DEGENERACY_TOL
        )
        if not (inside or degenerate_tail):
            break
        total += abs(psi.overlap(phi)) ** 2
        prev_included_energy = e
    return float(total)
