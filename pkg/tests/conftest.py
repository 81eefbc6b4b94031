import json
from pathlib import Path

import numpy as np
import pytest

from qres.integrals import assemble_fermionic_hamiltonian, parse_fcidump
from qres.pauli import jordan_wigner
from qres.states import cisd_state, eigensolve

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

H4_CELLS = ["h4_chain_eq", "h4_chain_corr", "h4_chain_diss", "h4_rect_corr", "h4_rect_diss"]
SMALL_CELLS = ["h2_0.74"] + H4_CELLS


def fixture_text(name: str) -> str:
    return (FIXTURE_DIR / f"{name}.fcidump").read_text()


def fixture_meta(name: str) -> dict:
    return json.loads((FIXTURE_DIR / f"{name}.meta.json").read_text())


class CellData:
    """Parsed fixture with lazily cached derived objects, shared per session."""

    def __init__(self, name: str):
        self.name = name
        self.ints = parse_fcidump(fixture_text(name))
        self.meta = fixture_meta(name)
        self._hq = None
        self._ground = None
        self._proxy = None

    @property
    def hq(self):
        if self._hq is None:
            self._hq = jordan_wigner(assemble_fermionic_hamiltonian(self.ints))
        return self._hq

    @property
    def ground(self):
        if self._ground is None:
            self._ground = eigensolve(self.hq, k=1)[0]
        return self._ground

    @property
    def proxy(self):
        if self._proxy is None:
            self._proxy = cisd_state(self.hq, self.ints.n_electrons, e0=self.ground[0])
        return self._proxy


_CACHE: dict[str, CellData] = {}


def cell(name: str) -> CellData:
    if name not in _CACHE:
        _CACHE[name] = CellData(name)
    return _CACHE[name]


@pytest.fixture(scope="session")
def h2():
    return cell("h2_0.74")


@pytest.fixture(scope="session", params=H4_CELLS)
def h4_cell(request):
    return cell(request.param)


# ---------------------------------------------------------------------------
# dense fermionic oracle, independent of the Jordan-Wigner path

def ladder_matrices(n: int) -> list[np.ndarray]:
    dim = 1 << n
    out = []
    for p in range(n):
        m = np.zeros((dim, dim))
        for b in range(dim):
            if (b >> p) & 1:
                sign = (-1) ** bin(b & ((1 << p) - 1)).count("1")
                m[b ^ (1 << p), b] = sign
        out.append(m)
    return out


def dense_fermionic(op) -> np.ndarray:
    n = op.n_spin_orbitals
    dim = 1 << n
    ann = ladder_matrices(n)
    exc = [[ann[p].T @ ann[q] for q in range(n)] for p in range(n)]
    H = np.eye(dim) * op.e_core
    nz = np.argwhere(np.abs(op.h) > 1e-14)
    for p, q in nz:
        H = H + op.h[p, q] * exc[p][q]
    if op.g is not None:
        nz = np.argwhere(np.abs(op.g) > 1e-14)
        for p, q, r, s in nz:
            H = H + op.g[p, q, r, s] * (exc[p][q] @ exc[r][s])
    return H


def random_symmetric_tensors(rng, n, scale=0.1):
    h = rng.normal(size=(n, n))
    h = (h + h.T) / 2
    g = rng.normal(size=(n, n, n, n)) * scale
    for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
        g = (g + g.transpose(perm)) / 2
    return h, g
