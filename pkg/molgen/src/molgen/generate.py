"""Geometry specs for the studied molecules and FCIDUMP fixture emission."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import ANGSTROM_TO_BOHR
from .scf import (
    ActiveSpaceIntegrals,
    ScfResult,
    fold_frozen_core_rhf,
    fold_frozen_core_uhf,
    run_scf,
)

H2O_ANGLE_DEG = 104.5
H4_RECT_FIXED_BOND = 1.0  # angstrom


@dataclass(frozen=True)
class GeometrySpec:
    molecule: str
    bond_length: float            # angstrom, the single stretched parameter
    reference: str = "rhf"        # 'rhf' | 'uhf'
    n_frozen: int = 0             # doubly-occupied core orbitals to fold away
    basis: str = "sto-3g"

    def atoms(self) -> list[tuple[str, tuple[float, float, float]]]:
        r = self.bond_length * ANGSTROM_TO_BOHR
        if self.molecule == "h2":
            return [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))]
        if self.molecule == "h4_chain":
            return [("H", (0.0, 0.0, k * r)) for k in range(4)]
        if self.molecule == "h4_rect":
            a = H4_RECT_FIXED_BOND * ANGSTROM_TO_BOHR
            return [
                ("H", (0.0, 0.0, 0.0)),
                ("H", (0.0, 0.0, a)),
                ("H", (r, 0.0, 0.0)),
                ("H", (r, 0.0, a)),
            ]
        if self.molecule == "h2o":
            half = np.radians(H2O_ANGLE_DEG) / 2.0
            return [
                ("O", (0.0, 0.0, 0.0)),
                ("H", (r * np.sin(half), 0.0, r * np.cos(half))),
                ("H", (-r * np.sin(half), 0.0, r * np.cos(half))),
            ]
        if self.molecule == "n2":
            return [("N", (0.0, 0.0, 0.0)), ("N", (0.0, 0.0, r))]
        raise ValueError(f"unknown molecule {self.molecule!r}")


# Geometry table: molecule -> {label: bond length in angstrom}
TABLE_GEOMETRIES = {
    "h4_chain": {"eq": 0.9, "corr": 2.0, "diss": 3.0},
    "h4_rect": {"corr": 1.0, "diss": 3.0},
    "h2o": {"eq": 1.0, "corr": 2.1, "diss": 3.0},
    "n2": {"eq": 1.2, "corr": 1.4, "diss": 2.2},
}

REFERENCES = {"h2": "rhf", "h4_chain": "rhf", "h4_rect": "rhf", "h2o": "uhf", "n2": "uhf"}
FROZEN_CORES = {"h2": 0, "h4_chain": 0, "h4_rect": 0, "h2o": 1, "n2": 2}


def standard_specs() -> dict[str, GeometrySpec]:
    """All (molecule, geometry) cells of the study plus the H2 test fixture."""
    specs = {"h2_0.74": GeometrySpec("h2", 0.74)}
    for mol, table in TABLE_GEOMETRIES.items():
        for label, r in table.items():
            specs[f"{mol}_{label}"] = GeometrySpec(
                mol, r, REFERENCES[mol], FROZEN_CORES[mol]
            )
    return specs


# ---------------------------------------------------------------------------
# FCIDUMP writing (format contract shared with the analysis package)

def _fmt(v: float, i: int, j: int, k: int, l: int) -> str:
    return f"{v:.17g} {i} {j} {k} {l}"


def _pairs(n):
    for i in range(n):
        for j in range(i + 1):
            yield i, j


def write_fcidump(act: ActiveSpaceIntegrals, tol: float = 1e-14) -> str:
    n = act.n_orb
    lines = [f" &FCI NORB={n},NELEC={act.n_electrons},MS2={act.ms2},"]
    if act.kind == "uhf":
        lines.append("  IUHF=1,")
    lines.append("  ORBSYM=" + "1," * n)
    lines.append("  ISYM=1,")
    lines.append(" &END")
    pairs = list(_pairs(n))

    def emit_8fold(g):
        for a, (i, j) in enumerate(pairs):
            for k, l in pairs[: a + 1]:
                if abs(g[i, j, k, l]) > tol:
                    lines.append(_fmt(g[i, j, k, l], i + 1, j + 1, k + 1, l + 1))

    def emit_4fold(g):
        for i, j in pairs:
            for k, l in pairs:
                if abs(g[i, j, k, l]) > tol:
                    lines.append(_fmt(g[i, j, k, l], i + 1, j + 1, k + 1, l + 1))

    def emit_1e(h):
        for i, j in _pairs(n):
            if abs(h[i, j]) > tol:
                lines.append(_fmt(h[i, j], i + 1, j + 1, 0, 0))

    if act.kind == "rhf":
        emit_8fold(act.g_blocks[0])
        emit_1e(act.h_blocks[0])
        lines.append(_fmt(act.e_core, 0, 0, 0, 0))
    else:
        g_aa, g_bb, g_ab = act.g_blocks
        emit_8fold(g_aa)
        lines.append(_fmt(0.0, 0, 0, 0, 0))
        emit_8fold(g_bb)
        lines.append(_fmt(0.0, 0, 0, 0, 0))
        emit_4fold(g_ab)
        lines.append(_fmt(0.0, 0, 0, 0, 0))
        emit_1e(act.h_blocks[0])
        lines.append(_fmt(0.0, 0, 0, 0, 0))
        emit_1e(act.h_blocks[1])
        lines.append(_fmt(0.0, 0, 0, 0, 0))
        lines.append(_fmt(act.e_core, 0, 0, 0, 0))
    return "\n".join(lines) + "\n"


@dataclass
class GenerationRecord:
    name: str
    spec: GeometrySpec
    scf: ScfResult
    active: ActiveSpaceIntegrals
    fcidump_text: str


def generate(spec: GeometrySpec, name: str | None = None) -> GenerationRecord:
    """Run SCF, fold the frozen core, and produce FCIDUMP text + metadata."""
    atoms = spec.atoms()
    scf = run_scf(atoms, reference=spec.reference)
    if spec.reference == "rhf":
        act = fold_frozen_core_rhf(scf, spec.n_frozen)
    else:
        act = fold_frozen_core_uhf(scf, spec.n_frozen)
    text = write_fcidump(act)
    label = name or f"{spec.molecule}_{spec.bond_length:g}"
    return GenerationRecord(label, spec, scf, act, text)


def metadata_dict(rec: GenerationRecord) -> dict:
    return {
        "name": rec.name,
        "molecule": rec.spec.molecule,
        "bond_length_angstrom": rec.spec.bond_length,
        "basis": rec.spec.basis,
        "reference": rec.spec.reference,
        "n_frozen_core": rec.spec.n_frozen,
        "scf_energy_hartree": rec.scf.energy,
        "scf_converged": rec.scf.converged,
        "scf_iterations": rec.scf.n_iter,
        "n_active_orbitals": rec.active.n_orb,
        "n_spin_orbitals": 2 * rec.active.n_orb,
        "n_active_electrons": rec.active.n_electrons,
        "ms2": rec.active.ms2,
    }


def generate_to_directory(specs: dict[str, GeometrySpec], out_dir: str | Path) -> list[dict]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for name, spec in specs.items():
        rec = generate(spec, name)
        (out / f"{name}.fcidump").write_text(rec.fcidump_text)
        meta = metadata_dict(rec)
        (out / f"{name}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        records.append(meta)
    return records
