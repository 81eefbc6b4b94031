"""FCIDUMP ingestion and spin-orbital integral tensors.

Spin-orbital ordering is interleaved: spatial orbital p maps to spin-orbitals
2p (alpha) and 2p+1 (beta). Stored tensors are in the two-body product form
H = sum h_pq E_pq + sum g_pqrs E_pq E_rs + e_core, i.e. the one-body tensor
absorbs the reordering correction -sum_r g_prrq of the physical Coulomb
operator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, IndexOutOfRangeError, ParseError

SYM_TOL = 1e-10


@dataclass(frozen=True)
class SpinOrbitalIntegrals:
    """One-/two-body integral tensors in the spin-orbital basis."""

    n_spin_orbitals: int
    n_electrons: int
    h: np.ndarray          # (N, N), hartree
    g: np.ndarray          # (N, N, N, N), hartree
    e_core: float
    reference_kind: str    # 'restricted' | 'unrestricted'
    ms2: int = 0

    def __post_init__(self):
        n = self.n_spin_orbitals
        if not (0 < self.n_electrons <= n):
            raise ConsistencyError(f"n_electrons={self.n_electrons} outside (0, {n}]")
        if self.h.shape != (n, n) or self.g.shape != (n, n, n, n):
            raise ConsistencyError("tensor shapes do not match n_spin_orbitals")
        if np.max(np.abs(self.h - self.h.T)) > SYM_TOL:
            raise ConsistencyError("one-body tensor not symmetric")
        for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
            if np.max(np.abs(self.g - self.g.transpose(perm))) > SYM_TOL:
                raise ConsistencyError(f"two-body tensor breaks symmetry {perm}")
        spin = np.arange(n) % 2
        cross = spin[:, None] != spin[None, :]
        if np.max(np.abs(self.h[cross])) > SYM_TOL:
            raise ConsistencyError("one-body tensor couples different spins")
        if np.max(np.abs(self.g[cross, :, :])) > SYM_TOL or np.max(np.abs(self.g[:, :, cross])) > SYM_TOL:
            raise ConsistencyError("two-body tensor couples different spins in a bra/ket pair")

    @property
    def n_spatial(self) -> int:
        return self.n_spin_orbitals // 2

    def spatial_two_body(self) -> np.ndarray:
        """Chemists' (pq|rs) spatial tensor (restricted references only)."""
        if self.reference_kind != "restricted":
            raise ConsistencyError("spatial tensor extraction requires a restricted reference")
        return 2.0 * self.g[0::2, 0::2, 0::2, 0::2]

    def spatial_one_body(self) -> np.ndarray:
        """Bare spatial h (reordering correction removed)."""
        if self.reference_kind != "restricted":
            raise ConsistencyError("spatial tensor extraction requires a restricted reference")
        bare = self.h + np.einsum("prrq->pq", self.g)
        return bare[0::2, 0::2].copy()


@dataclass(frozen=True)
class FermionicOperator:
    """Hermitian operator sum h_pq E_pq + sum g_pqrs E_pq E_rs + e_core."""

    n_spin_orbitals: int
    h: np.ndarray
    g: np.ndarray | None
    e_core: float


def assemble_fermionic_hamiltonian(ints: SpinOrbitalIntegrals) -> FermionicOperator:
    """Operator form of the integrals; Hermitian by tensor symmetry."""
    return FermionicOperator(ints.n_spin_orbitals, ints.h.copy(), ints.g.copy(), ints.e_core)


# ---------------------------------------------------------------------------
# FCIDUMP parsing

_HEADER_KV = re.compile(r"([A-Za-z0-9_]+)\s*=\s*([^,\s]+)")


def _parse_header(lines: list[str]) -> tuple[dict, int]:
    """Returns (fields, index of first body line)."""
    if not lines or "&FCI" not in lines[0].upper():
        raise ParseError("missing &FCI namelist header")
    header_text = []
    end = None
    for i, ln in enumerate(lines):
        header_text.append(ln)
        upper = ln.upper()
        if "&END" in upper or upper.strip() in ("/", "&/"):
            end = i
            break
    if end is None:
        raise ParseError("header not terminated by &END")
    joined = " ".join(header_text).replace("&FCI", " ").replace("&END", " ")
    fields: dict = {}
    for key, val in _HEADER_KV.findall(joined):
        key = key.upper()
        if key in ("NORB", "NELEC", "MS2", "ISYM", "IUHF"):
            try:
                fields[key] = int(val)
            except ValueError as exc:
                raise ParseError(f"bad integer for {key}: {val}") from exc
        elif key == "UHF":
            fields["IUHF"] = 1 if "T" in val.upper() else 0
        elif key == "ORBSYM":
            pass  # parsed and ignored
    if "NORB" not in fields or "NELEC" not in fields:
        raise ParseError("header must define NORB and NELEC")
    return fields, end + 1


def _set_two_body(store: np.ndarray, i, j, k, l, v, perms8: bool, tol=1e-12):
    """Fill the symmetry orbit of one entry, flagging conflicts."""
    targets = {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k)}
    if perms8:
        targets |= {(k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}
    for t in targets:
        old = store[t]
        if not np.isnan(old) and abs(old - v) > tol:
            raise ConsistencyError(f"conflicting duplicate two-body entry at {t}: {old} vs {v}")
        store[t] = v


def _set_one_body(store: np.ndarray, i, j, v, tol=1e-12):
    for t in ((i, j), (j, i)):
        old = store[t]
        if not np.isnan(old) and abs(old - v) > tol:
            raise ConsistencyError(f"conflicting duplicate one-body entry at {t}: {old} vs {v}")
        store[t] = v


def parse_fcidump(text: str) -> SpinOrbitalIntegrals:
    """Parse FCIDUMP text (chemists' notation, 1-based spatial indices).

    Restricted files hold one two-electron block with 8-fold symmetry;
    unrestricted files (IUHF=1) use the zero-delimited block convention
    aa, bb, ab, h_a, h_b, core.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    fields, body_start = _parse_header(lines)
    norb = fields["NORB"]
    nelec = fields["NELEC"]
    ms2 = fields.get("MS2", 0)
    uhf = bool(fields.get("IUHF", 0))
    if norb <= 0 or nelec <= 0:
        raise ParseError("NORB and NELEC must be positive")

    nan = float("nan")
    g_blocks = [np.full((norb,) * 4, nan) for _ in range(3 if uhf else 1)]
    h_blocks = [np.full((norb, norb), nan) for _ in range(2 if uhf else 1)]
    e_core = 0.0
    block = 0  # unrestricted block counter

    for ln in lines[body_start:]:
        parts = ln.replace("D", "E").replace("d", "e").split()
        if len(parts) != 5:
            raise ParseError(f"expected 'value i j k l': {ln!r}")
        try:
            v = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError as exc:
            raise ParseError(f"unparseable line: {ln!r}") from exc
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise IndexOutOfRangeError(f"orbital index {idx} outside 1..{norb}: {ln!r}")

        if i == 0 and j == 0 and k == 0 and l == 0:
            if uhf:
                block += 1
                if block == 6:
                    e_core = v
                elif block > 6:
                    raise ParseError("too many zero-index delimiter lines")
                elif v != 0.0:
                    raise ParseError("nonzero value on a block delimiter line")
            else:
                e_core = v
            continue

        if k == 0 and l == 0:
            if j == 0:
                continue  # orbital-energy record, ignored
            if uhf and block not in (3, 4):
                raise ParseError("one-body entry outside a one-body block")
            hb = h_blocks[block - 3] if uhf else h_blocks[0]
            _set_one_body(hb, i - 1, j - 1, v)
            continue

        if i == 0 or j == 0 or k == 0 or l == 0:
            raise ParseError(f"mixed zero/nonzero indices: {ln!r}")
        if uhf and block > 2:
            raise ParseError("two-body entry after one-body blocks began")
        gb = g_blocks[block] if uhf else g_blocks[0]
        _set_two_body(gb, i - 1, j - 1, k - 1, l - 1, v, perms8=(not uhf or block < 2))

    for arr in g_blocks:
        np.nan_to_num(arr, copy=False)
    for arr in h_blocks:
        np.nan_to_num(arr, copy=False)

    return _expand_to_spin_orbitals(norb, nelec, ms2, uhf, h_blocks, g_blocks, e_core)


def _expand_to_spin_orbitals(norb, nelec, ms2, uhf, h_blocks, g_blocks, e_core):
    n = 2 * norb
    g_so = np.zeros((n, n, n, n))
    h_bare = np.zeros((n, n))
    if uhf:
        g_aa, g_bb, g_ab = g_blocks
        g_so[0::2, 0::2, 0::2, 0::2] = 0.5 * g_aa
        g_so[1::2, 1::2, 1::2, 1::2] = 0.5 * g_bb
        g_so[0::2, 0::2, 1::2, 1::2] = 0.5 * g_ab
        g_so[1::2, 1::2, 0::2, 0::2] = 0.5 * g_ab.transpose(2, 3, 0, 1)
        h_bare[0::2, 0::2] = h_blocks[0]
        h_bare[1::2, 1::2] = h_blocks[1]
    else:
        gt = g_blocks[0]
        for s in (0, 1):
            for t in (0, 1):
                g_so[s::2, s::2, t::2, t::2] = 0.5 * gt
        h_bare[0::2, 0::2] = h_blocks[0]
        h_bare[1::2, 1::2] = h_blocks[0]

    h_paper = h_bare - np.einsum("prrq->pq", g_so)
    return SpinOrbitalIntegrals(
        n_spin_orbitals=n,
        n_electrons=nelec,
        h=h_paper,
        g=g_so,
        e_core=float(e_core),
        reference_kind="unrestricted" if uhf else "restricted",
        ms2=ms2,
    )


# ---------------------------------------------------------------------------
# FCIDUMP serialization (round-trip partner of parse_fcidump)

def _format_line(v: float, i: int, j: int, k: int, l: int) -> str:
    return f"{v:.17g} {i} {j} {k} {l}"


def serialize_fcidump(ints: SpinOrbitalIntegrals, tol: float = 1e-16) -> str:
    """Write integrals back to FCIDUMP text with the conventions of
    parse_fcidump; parse(serialize(x)) reproduces x to 1e-12."""
    norb = ints.n_spatial
    uhf = ints.reference_kind == "unrestricted"
    out = [f" &FCI NORB={norb},NELEC={ints.n_electrons},MS2={ints.ms2},"]
    if uhf:
        out.append("  IUHF=1,")
    out.append("  ORBSYM=" + "1," * norb)
    out.append("  ISYM=1,")
    out.append(" &END")

    h_bare = ints.h + np.einsum("prrq->pq", ints.g)

    def canonical_pairs():
        for i in range(norb):
            for j in range(i + 1):
                yield i, j

    if not uhf:
        gt = 2.0 * ints.g[0::2, 0::2, 0::2, 0::2]
        ht = h_bare[0::2, 0::2]
        pairs = list(canonical_pairs())
        for a, (i, j) in enumerate(pairs):
            for k, l in pairs[: a + 1]:
                v = gt[i, j, k, l]
                if abs(v) > tol:
                    out.append(_format_line(v, i + 1, j + 1, k + 1, l + 1))
        for i, j in canonical_pairs():
            if abs(ht[i, j]) > tol:
                out.append(_format_line(ht[i, j], i + 1, j + 1, 0, 0))
        out.append(_format_line(ints.e_core, 0, 0, 0, 0))
    else:
        g_aa = 2.0 * ints.g[0::2, 0::2, 0::2, 0::2]
        g_bb = 2.0 * ints.g[1::2, 1::2, 1::2, 1::2]
        g_ab = 2.0 * ints.g[0::2, 0::2, 1::2, 1::2]
        pairs = list(canonical_pairs())
        for gt, full_orbit in ((g_aa, True), (g_bb, True), (g_ab, False)):
            if full_orbit:
                for a, (i, j) in enumerate(pairs):
                    for k, l in pairs[: a + 1]:
                        v = gt[i, j, k, l]
                        if abs(v) > tol:
                            out.append(_format_line(v, i + 1, j + 1, k + 1, l + 1))
            else:
                for i, j in pairs:
                    for k, l in pairs:
                        v = gt[i, j, k, l]
                        if abs(v) > tol:
                            out.append(_format_line(v, i + 1, j + 1, k + 1, l + 1))
            out.append(_format_line(0.0, 0, 0, 0, 0))
        for hs, spin in ((h_bare[0::2, 0::2], 0), (h_bare[1::2, 1::2], 1)):
            for i, j in canonical_pairs():
                if abs(hs[i, j]) > tol:
                    out.append(_format_line(hs[i, j], i + 1, j + 1, 0, 0))
            out.append(_format_line(0.0, 0, 0, 0, 0))
        out.append(_format_line(ints.e_core, 0, 0, 0, 0))
    return "\n".join(out) + "\n"
