"""Restricted and unrestricted Hartree-Fock with DIIS, plus MO transforms
and frozen-core integral folding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import build_basis, nuclear_repulsion
from .mdintegrals import eri_tensor, kinetic_matrix, nuclear_matrix, overlap_matrix


@dataclass
class ScfResult:
    kind: str                  # 'rhf' | 'uhf'
    energy: float              # total (electronic + nuclear)
    e_nuc: float
    mo_coeff: tuple[np.ndarray, ...]   # (C,) for RHF, (Ca, Cb) for UHF
    mo_energy: tuple[np.ndarray, ...]
    n_alpha: int
    n_beta: int
    converged: bool
    n_iter: int
    hcore: np.ndarray
    eri: np.ndarray
    overlap: np.ndarray


class ScfNotConverged(RuntimeError):
    pass


def _symmetric_orthogonalizer(S: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(S)
    return v @ np.diag(w ** -0.5) @ v.T


class _Diis:
    def __init__(self, max_vecs: int = 8):
        self.errs: list[np.ndarray] = []
        self.focks: list[np.ndarray] = []
        self.max_vecs = max_vecs

    def push(self, fock: np.ndarray, err: np.ndarray) -> np.ndarray:
        self.errs.append(err.ravel())
        self.focks.append(fock)
        if len(self.errs) > self.max_vecs:
            self.errs.pop(0)
            self.focks.pop(0)
        m = len(self.errs)
        if m < 2:
            return fock
        B = -np.ones((m + 1, m + 1))
        B[m, m] = 0.0
        for i in range(m):
            for j in range(m):
                B[i, j] = self.errs[i] @ self.errs[j]
        rhs = np.zeros(m + 1)
        rhs[m] = -1.0
        try:
            c = np.linalg.solve(B, rhs)[:m]
        except np.linalg.LinAlgError:
            return fock
        return sum(ci * fi for ci, fi in zip(c, self.focks))


def _build_jk(eri, D):
    J = np.einsum("pqrs,rs->pq", eri, D, optimize=True)
    K = np.einsum("prqs,rs->pq", eri, D, optimize=True)
    return J, K


def _initial_orbitals(h, S, X, mode: str):
    """Seed orbitals from the core Hamiltonian or a generalized
    Wolfsberg-Helmholz Fock; neither dominates the other (GWH rescues
    multiply-bonded molecules, core-H rescues open-shell atoms), so callers
    try both and keep the lower solution."""
    if mode == "core":
        F0 = h
    else:
        d = np.diag(h)
        F0 = 0.5 * 1.75 * (d[:, None] + d[None, :]) * S
        np.fill_diagonal(F0, d)
    _, C = np.linalg.eigh(X.T @ F0 @ X)
    return X @ C


@dataclass
class _Integrals:
    S: np.ndarray
    h: np.ndarray
    eri: np.ndarray
    e_nuc: float
    nelec: int


def _setup(atoms) -> _Integrals:
    basis = build_basis(atoms)
    return _Integrals(
        overlap_matrix(basis),
        kinetic_matrix(basis) + nuclear_matrix(basis, atoms),
        eri_tensor(basis),
        nuclear_repulsion(atoms),
        sum({"H": 1, "N": 7, "O": 8}[a] for a, _ in atoms),
    )


def run_rhf(atoms, max_iter=200, conv=1e-11, level_shift=0.0, guess_mode="gwh",
            ints: _Integrals | None = None):
    ints = ints or _setup(atoms)
    S, h, eri, e_nuc, nelec = ints.S, ints.h, ints.eri, ints.e_nuc, ints.nelec
    nocc = nelec // 2

    X = _symmetric_orthogonalizer(S)
    C = _initial_orbitals(h, S, X, guess_mode)
    eps = None
    diis = _Diis()
    e_old = 0.0
    for it in range(1, max_iter + 1):
        Cocc = C[:, :nocc]
        P = 2.0 * Cocc @ Cocc.T
        J, K = _build_jk(eri, P)
        F = h + J - 0.5 * K
        e_elec = 0.5 * np.einsum("pq,pq->", P, h + F)
        err = F @ P @ S - S @ P @ F
        F = diis.push(F, X.T @ err @ X)
        if level_shift > 0.0:
            F = F + level_shift * (S - S @ (P / 2) @ S)
        eps, Cp = np.linalg.eigh(X.T @ F @ X)
        C = X @ Cp
        if abs(e_elec - e_old) < conv and np.max(np.abs(err)) < 1e-8:
            return ScfResult("rhf", float(e_elec + e_nuc), e_nuc, (C,), (eps,),
                             nocc, nocc, True, it, h, eri, S)
        e_old = e_elec
    raise ScfNotConverged(f"RHF not converged in {max_iter} iterations")


def run_uhf(atoms, ms2=0, max_iter=400, conv=1e-11, mix=0.35, level_shift=0.0,
            guess=None, guess_densities=None, guess_mode="gwh",
            ints: _Integrals | None = None):
    ints = ints or _setup(atoms)
    S, h, eri, e_nuc, nelec = ints.S, ints.h, ints.eri, ints.e_nuc, ints.nelec
    na = (nelec + ms2) // 2
    nb = nelec - na

    X = _symmetric_orthogonalizer(S)
    Da = Db = None
    if guess_densities is not None:
        Da, Db = guess_densities
    else:
        if guess is not None:
            Ca, Cb = guess
        else:
            Ca = _initial_orbitals(h, S, X, guess_mode)
            Cb = Ca.copy()
        # break spin symmetry: rotate the alpha HOMO/LUMO pair
        if mix and na < Ca.shape[1]:
            homo, lumo = Ca[:, na - 1].copy(), Ca[:, na].copy()
            Ca[:, na - 1] = np.cos(mix) * homo + np.sin(mix) * lumo
            Ca[:, na] = -np.sin(mix) * homo + np.cos(mix) * lumo
        Da = Ca[:, :na] @ Ca[:, :na].T
        Db = Cb[:, :nb] @ Cb[:, :nb].T

    diis = _Diis()
    e_old = 0.0
    for it in range(1, max_iter + 1):
        Jt, Ka = _build_jk(eri, Da + Db)[0], _build_jk(eri, Da)[1]
        Kb = _build_jk(eri, Db)[1]
        Fa = h + Jt - Ka
        Fb = h + Jt - Kb
        e_elec = 0.5 * (np.einsum("pq,pq->", Da, h + Fa) + np.einsum("pq,pq->", Db, h + Fb))
        erra = Fa @ Da @ S - S @ Da @ Fa
        errb = Fb @ Db @ S - S @ Db @ Fb
        Fbig = diis.push(np.stack([Fa, Fb]),
                         np.stack([X.T @ erra @ X, X.T @ errb @ X]))
        Fa, Fb = Fbig[0], Fbig[1]
        if level_shift > 0.0:
            Fa = Fa + level_shift * (S - S @ Da @ S)
            Fb = Fb + level_shift * (S - S @ Db @ S)
        ea, Cpa = np.linalg.eigh(X.T @ Fa @ X)
        eb, Cpb = np.linalg.eigh(X.T @ Fb @ X)
        Ca, Cb = X @ Cpa, X @ Cpb
        converged = (abs(e_elec - e_old) < conv
                     and max(np.max(np.abs(erra)), np.max(np.abs(errb))) < 1e-8)
        Da = Ca[:, :na] @ Ca[:, :na].T
        Db = Cb[:, :nb] @ Cb[:, :nb].T
        if converged:
            return ScfResult("uhf", float(e_elec + e_nuc), e_nuc, (Ca, Cb), (ea, eb),
                             na, nb, True, it, h, eri, S)
        e_old = e_elec
    raise ScfNotConverged(f"UHF not converged in {max_iter} iterations")


def _atomic_uhf(element: str):
    ms2_map = {"H": 1, "N": 3, "O": 2}
    atoms = [(element, (0.0, 0.0, 0.0))]
    runs = [run_uhf(atoms, ms2=ms2_map[element], mix=0.0, guess_mode=m)
            for m in ("core", "gwh")]
    return min(runs, key=lambda r: r.energy)


def _fragment_density_guess(atoms):
    """Antiferromagnetic superposition of atomic UHF densities: majority spin
    alternates between atoms. Returns (Da, Db) in the molecular AO basis."""
    blocks_a, blocks_b = [], []
    flip = False
    for element, _ in atoms:
        at = _atomic_uhf(element)
        Ca, Cb = at.mo_coeff
        Da = Ca[:, : at.n_alpha] @ Ca[:, : at.n_alpha].T
        Db = Cb[:, : at.n_beta] @ Cb[:, : at.n_beta].T
        if flip:
            Da, Db = Db, Da
        blocks_a.append(Da)
        blocks_b.append(Db)
        flip = not flip
    from scipy.linalg import block_diag

    return block_diag(*blocks_a), block_diag(*blocks_b)


def run_scf(atoms, reference="rhf", ms2=0):
    """SCF over several initial guesses, keeping the lowest converged
    solution; each guess gets a level-shifted retry on non-convergence."""
    ints = _setup(atoms)

    def attempt(runner, **kwargs):
        try:
            return runner(atoms, ints=ints, **kwargs)
        except ScfNotConverged:
            try:
                return runner(atoms, ints=ints, level_shift=0.3,
                              max_iter=1200, **kwargs)
            except ScfNotConverged:
                return None

    if reference == "rhf":
        runs = [attempt(run_rhf, guess_mode=m) for m in ("gwh", "core")]
    else:
        runs = [
            attempt(run_uhf, ms2=ms2, mix=0.35, guess_mode="gwh"),
            attempt(run_uhf, ms2=ms2, mix=0.35, guess_mode="core"),
            attempt(run_uhf, ms2=ms2, guess_densities=_fragment_density_guess(atoms)),
        ]
    runs = [r for r in runs if r is not None]
    if not runs:
        raise ScfNotConverged("all SCF attempts failed")
    return min(runs, key=lambda r: r.energy)


# ---------------------------------------------------------------------------
# MO transforms and frozen-core folding

def mo_transform_1e(h, C1, C2):
    return C1.T @ h @ C2


def mo_transform_2e(eri, C1, C2, C3, C4):
    """(pq|rs) in MO basis; chemists' index pairing (p,q) bra pair."""
    t = np.einsum("up,uvls->pvls", C1, eri, optimize=True)
    t = np.einsum("vq,pvls->pqls", C2, t, optimize=True)
    t = np.einsum("lr,pqls->pqrs", C3, t, optimize=True)
    return np.einsum("st,pqrs->pqrt", C4, t, optimize=True)


@dataclass
class ActiveSpaceIntegrals:
    """Spatial MO integrals after frozen-core folding."""

    kind: str
    n_orb: int
    n_electrons: int
    ms2: int
    e_core: float
    h_blocks: tuple[np.ndarray, ...]         # (h,) or (h_a, h_b)
    g_blocks: tuple[np.ndarray, ...]         # (g,) or (g_aa, g_bb, g_ab)


def fold_frozen_core_rhf(scf: ScfResult, n_frozen: int) -> ActiveSpaceIntegrals:
    C = scf.mo_coeff[0]
    h = mo_transform_1e(scf.hcore, C, C)
    g = mo_transform_2e(scf.eri, C, C, C, C)
    core = list(range(n_frozen))
    act = list(range(n_frozen, C.shape[1]))
    e_core = scf.e_nuc + 2.0 * sum(h[c, c] for c in core)
    for c in core:
        for d in core:
            e_core += 2.0 * g[c, c, d, d] - g[c, d, d, c]
    ha = h[np.ix_(act, act)].copy()
    for c in core:
        ha += 2.0 * g[np.ix_(act, act)][:, :, c, c] - g[np.ix_(act, [c], [c], act)].reshape(len(act), len(act))
    ga = g[np.ix_(act, act, act, act)].copy()
    return ActiveSpaceIntegrals(
        "rhf", len(act), 2 * (scf.n_alpha - n_frozen), 0, float(e_core), (ha,), (ga,)
    )


def fold_frozen_core_uhf(scf: ScfResult, n_frozen: int) -> ActiveSpaceIntegrals:
    Ca, Cb = scf.mo_coeff
    ha = mo_transform_1e(scf.hcore, Ca, Ca)
    hb = mo_transform_1e(scf.hcore, Cb, Cb)
    g_aa = mo_transform_2e(scf.eri, Ca, Ca, Ca, Ca)
    g_bb = mo_transform_2e(scf.eri, Cb, Cb, Cb, Cb)
    g_ab = mo_transform_2e(scf.eri, Ca, Ca, Cb, Cb)
    core = list(range(n_frozen))
    act = list(range(n_frozen, Ca.shape[1]))

    e_core = scf.e_nuc
    for c in core:
        e_core += ha[c, c] + hb[c, c]
    for c in core:
        for d in core:
            e_core += 0.5 * (g_aa[c, c, d, d] - g_aa[c, d, d, c])
            e_core += 0.5 * (g_bb[c, c, d, d] - g_bb[c, d, d, c])
            e_core += g_ab[c, c, d, d]

    ia = np.ix_(act, act)
    ha_act = ha[ia].copy()
    hb_act = hb[ia].copy()
    for c in core:
        ha_act += g_aa[ia][:, :, c, c] - g_aa[np.ix_(act, [c], [c], act)].reshape(len(act), len(act))
        ha_act += g_ab[ia][:, :, c, c]
        hb_act += g_bb[ia][:, :, c, c] - g_bb[np.ix_(act, [c], [c], act)].reshape(len(act), len(act))
        hb_act += g_ab[np.ix_([c], [c], act, act)].reshape(len(act), len(act))

    sel4 = np.ix_(act, act, act, act)
    return ActiveSpaceIntegrals(
        "uhf",
        len(act),
        (scf.n_alpha - n_frozen) + (scf.n_beta - n_frozen),
        scf.n_alpha - scf.n_beta,
        float(e_core),
        (ha_act, hb_act),
        (g_aa[sel4].copy(), g_bb[sel4].copy(), g_ab[sel4].copy()),
    )
