"""Command-line front end: per-cell analyses emitting schema-validated JSON
reports, plus a collation step producing table-shaped CSV."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import costs, fermion_frag, pauli_frag, qcc
from .errors import QresError, SolverError
from .integrals import assemble_fermionic_hamiltonian, parse_fcidump
from .pauli import jordan_wigner
from .states import (
    SymmetrySector,
    cisd_state,
    eigensolve,
    find_pauli_symmetries,
    hf_state,
    sector_from_symmetries,
)

EXIT_BAD_FIXTURE = 2
EXIT_SOLVER = 3

LARGE_QUBIT_LIMIT = 10


def _load_schema():
    with resources.files("qres.schema").joinpath("cost_report.schema.json").open() as fh:
        return json.load(fh)


_SCHEMA = None


def validate_report(report: dict) -> dict:
    import jsonschema

    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = _load_schema()
    jsonschema.validate(report, _SCHEMA)
    return report


def _metric(value, units: str) -> dict:
    if value is None:
        return {"value": None, "units": units}
    if isinstance(value, (list, tuple, np.ndarray)):
        return {"value": [float(v) for v in value], "units": units}
    if isinstance(value, (int, np.integer)):
        return {"value": int(value), "units": units}
    return {"value": float(value), "units": units}


def _cell_labels(path: Path) -> tuple[str, str]:
    stem = path.stem.replace(".fcidump", "")
    parts = stem.rsplit("_", 1)
    if len(parts) == 2:
        return parts[0], parts[1]
    return stem, ""


class Cell:
    """One parsed fixture plus lazily-built derived objects."""

    def __init__(self, path: Path, seed: int):
        if not path.exists():
            raise FileNotFoundError(path)
        self.path = path
        self.molecule, self.geometry = _cell_labels(path)
        self.ints = parse_fcidump(path.read_text())
        self.seed = seed
        self._hq = None
        self._proxy = None
        self._shifted = None

    @property
    def n_qubits(self) -> int:
        return self.ints.n_spin_orbitals

    @property
    def hq(self):
        if self._hq is None:
            self._hq = jordan_wigner(assemble_fermionic_hamiltonian(self.ints))
        return self._hq

    def proxy(self):
        if self._proxy is None:
            e0 = eigensolve(self.hq, k=1)[0][0]
            self._proxy = cisd_state(self.hq, self.ints.n_electrons, e0=e0)
        return self._proxy

    def shifted_operators(self):
        if self._shifted is None:
            op = assemble_fermionic_hamiltonian(self.ints)
            self._shifted = costs.ShiftedOperators.build(op, self.ints.n_electrons, self.hq)
        return self._shifted

    def parity_sector(self):
        """Spin-up/spin-down parity sector fixed by the HF determinant.

        These two parities are exact symmetries of every molecular JW
        Hamiltonian; the discovered-kernel generators (find_pauli_symmetries)
        can be strictly larger for high-symmetry fixtures and would tighten
        kappa_Q below the reported convention.
        """
        from .pauli import PauliProduct

        n = self.n_qubits
        hf = hf_state(n, self.ints.n_electrons)
        up = PauliProduct(0, sum(1 << q for q in range(0, n, 2)), n)
        down = PauliProduct(0, sum(1 << q for q in range(1, n, 2)), n)
        return sector_from_symmetries([up, down], hf)

    def report(self, method: str, metrics: dict, config: dict, warnings=None) -> dict:
        rep = {
            "schema_version": 1,
            "method": method,
            "molecule": self.molecule,
            "geometry": self.geometry,
            "metrics": metrics,
            "config": {"fixture": str(self.path), "seed": self.seed, **config},
        }
        if warnings:
            rep["warnings"] = list(warnings)
        return validate_report(rep)


def _parse_sector(text: str | None, cell: Cell) -> SymmetrySector | None:
    if not text:
        return None
    if not text.startswith("ne="):
        raise argparse.ArgumentTypeError("sector must look like ne=<int>")
    return SymmetrySector(electron_count=int(text[3:]))


def _lr_fragments(cell: Cell, shift: bool, method: str):
    op = assemble_fermionic_hamiltonian(cell.ints)
    shift_params = None
    if shift:
        objective = "lr"
        s = costs.optimize_shift(cell.shifted_operators(), objective)
        op = fermion_frag.apply_symmetry_shift(op, s)
        shift_params = (s.s0, s.s1, s.s2)
    frags = fermion_frag.low_rank_decompose(op, tol=1e-8)
    if method == "lr-lcu":
        frags = fermion_frag.lr_lcu_optimize(frags)
    elif method == "lr-f3":
        frags, _ = fermion_frag.f3_repartition(frags, cell.proxy().state)
    return frags, shift_params


# ---------------------------------------------------------------------------
# subcommands

def cmd_partition(cell: Cell, args) -> dict:
    method = args.method
    config = {"shift": bool(args.shift)}
    if method in ("fc-si", "ac-si"):
        kind = "commuting" if method == "fc-si" else "anticommuting"
        poly = cell.hq
        shift_params = None
        if args.shift:
            s = costs.optimize_shift(cell.shifted_operators(), "ac")
            poly = cell.shifted_operators().shifted_polynomial(s.s1, s.s2)
            shift_params = (s.s0, s.s1, s.s2)
        fragset = pauli_frag.sorted_insertion(poly, kind)
        sizes = [len(f.members) for f in fragset]
        norms = [f.two_norm() for f in fragset]
        metrics = {
            "n_fragments": _metric(len(fragset), "count"),
            "group_sizes": _metric(sizes, "count"),
            "group_two_norms": _metric(norms, "hartree"),
        }
        if kind == "commuting":
            pauli_frag.attach_diagonalizers(fragset)
            gc = costs.circuit_cost(fragset)
            metrics["gate_counts_avg"] = _metric([gc.one_qubit, gc.two_qubit, gc.depth], "gates")
        if shift_params:
            metrics["shift_coefficients"] = _metric(shift_params, "hartree")
        return cell.report(f"partition/{method}", metrics, config)

    frags, shift_params = _lr_fragments(cell, args.shift, method)
    norms = [float(np.abs(f.two_body).sum() + np.abs(f.one_body).sum()) for f in frags]
    givens = [len(fermion_frag.givens_decompose(f.rotation)) for f in frags]
    metrics = {
        "n_fragments": _metric(len(frags), "count"),
        "fragment_one_norms": _metric(norms, "hartree"),
        "givens_counts": _metric(givens, "count"),
    }
    if shift_params:
        metrics["shift_coefficients"] = _metric(shift_params, "hartree")
    return cell.report(f"partition/{method}", metrics, config)


def cmd_measure_cost(cell: Cell, args) -> dict:
    proxy = cell.proxy().state
    if args.method == "fc-si":
        fragset = pauli_frag.attach_diagonalizers(
            pauli_frag.sorted_insertion(cell.hq, "commuting"))
        m = costs.measurement_count(fragset, proxy, args.epsilon)
        gc = costs.circuit_cost(fragset)
    elif args.method == "lr-f3":
        frags = fermion_frag.low_rank_decompose(
            assemble_fermionic_hamiltonian(cell.ints), tol=1e-8)
        frags, m = fermion_frag.f3_repartition(frags, proxy, epsilon=args.epsilon)
        gc = costs.circuit_cost(frags)
    else:
        raise QresError(f"measure-cost does not support method {args.method}")
    metrics = {
        "m_eps": _metric(m, "measurements"),
        "epsilon": _metric(args.epsilon, "hartree"),
        "gate_counts_avg": _metric([gc.one_qubit, gc.two_qubit, gc.depth], "gates"),
    }
    return cell.report(f"measure-cost/{args.method}", metrics, {"epsilon": args.epsilon})


def cmd_trotter_cost(cell: Cell, args) -> dict:
    if args.method == "fc-si":
        fragset = pauli_frag.sorted_insertion(cell.hq, "commuting")
        sector = cell.parity_sector()
        frags = list(fragset)
    elif args.method == "lr-lcu":
        frags, _ = _lr_fragments(cell, False, "lr-lcu")
        sector = SymmetrySector(electron_count=cell.ints.n_electrons)
    else:
        raise QresError(f"trotter-cost does not support method {args.method}")
    kq = costs.kappa_q(frags, sector, n_qubits=cell.n_qubits)
    c_total, s_l, beta = costs.spectral_descriptors(frags, sector, n_qubits=cell.n_qubits)
    rng_full = 2.0 * costs.half_spectral_range(cell.hq)
    n_s, tau = costs.trotter_steps(kq, args.epsilon, args.p0, rng_full)
    metrics = {
        "kappa_q": _metric(kq, "hartree"),
        "c_total": _metric(c_total, "hartree"),
        "s_linear": _metric(s_l, "dimensionless"),
        "beta": _metric(beta, "hartree^2"),
        "trotter_steps": _metric(n_s, "count"),
        "tau": _metric(tau, "1/hartree"),
        "epsilon": _metric(args.epsilon, "hartree"),
        "p0": _metric(args.p0, "dimensionless"),
    }
    return cell.report(f"trotter-cost/{args.method}",
                       metrics, {"epsilon": args.epsilon, "p0": args.p0})


def cmd_lcu_cost(cell: Cell, args) -> dict:
    config = {"shift": bool(args.shift)}
    warnings = []
    if args.method == "ac-si":
        poly = cell.hq
        shift_params = None
        if args.shift:
            s = costs.optimize_shift(cell.shifted_operators(), "ac")
            poly = cell.shifted_operators().shifted_polynomial(s.s1, s.s2)
            shift_params = (s.s0, s.s1, s.s2)
        lam, count = pauli_frag.lcu_norm_ac(pauli_frag.sorted_insertion(poly, "anticommuting"))
        count_name = "n_unitaries"
    elif args.method == "lr":
        frags, shift_params = _lr_fragments(cell, args.shift, "lr")
        lam, count = fermion_frag.lcu_norm_lr(frags)
        count_name = "n_fragments"
    else:
        raise QresError(f"lcu-cost does not support method {args.method}")

    if args.shift:
        srange = costs.optimal_range_shift(cell.hq, cell.ints.n_electrons)[1]
    else:
        srange = costs.half_spectral_range(cell.hq)
    metrics = {
        "lambda": _metric(lam, "hartree"),
        count_name: _metric(count, "count"),
        "half_spectral_range": _metric(srange, "hartree"),
    }
    if shift_params:
        metrics["shift_coefficients"] = _metric(shift_params, "hartree")
    return cell.report(f"lcu-cost/{args.method}", metrics, config, warnings)


def cmd_qcc(cell: Cell, args) -> dict:
    schedule = tuple(int(x) for x in args.nent.split(","))
    res = qcc.qcc_run(cell.hq, cell.ints.n_electrons, schedule=schedule,
                      batch=args.iqcc_batch, restarts=args.restarts, seed=args.seed)
    metrics = {}
    for cp in res.checkpoints:
        metrics[f"error_nent_{cp.n_ent}"] = _metric(cp.error, "hartree")
        metrics[f"overlap_nent_{cp.n_ent}"] = _metric(cp.overlap, "dimensionless")
    cfg = {"nent": list(schedule), "batch": args.iqcc_batch, "restarts": args.restarts}
    return cell.report("qcc", metrics, cfg, res.warnings)


def cmd_exact(cell: Cell, args) -> dict:
    sector = _parse_sector(args.sector, cell)
    pairs = eigensolve(cell.hq, k=args.k, sector=sector)
    metrics = {
        "eigenvalues": _metric([e for e, _ in pairs], "hartree"),
    }
    if args.dump_states:
        out = Path(args.dump_states)
        lines = []
        for i, (e, psi) in enumerate(pairs):
            for b, a in zip(psi.indices, psi.amplitudes):
                lines.append(f"{i} {int(b)} {a.real:.17g} {a.imag:.17g}")
        out.write_text("\n".join(lines) + "\n")
    return cell.report("exact", metrics, {"sector": args.sector, "k": args.k})


def cmd_report(args) -> int:
    rows = []
    for path in args.inputs:
        for line in Path(path).read_text().splitlines():
            if line.strip():
                rows.append(json.loads(line))
    flat = []
    for r in rows:
        row = {"method": r["method"], "molecule": r["molecule"], "geometry": r["geometry"]}
        for key, m in r["metrics"].items():
            v = m["value"]
            if isinstance(v, list):
                continue
            row[key] = v
        flat.append(row)
    flat.sort(key=lambda r: (r["method"], r["molecule"], r["geometry"]))
    fields: list[str] = []
    for r in flat:
        for k in r:
            if k not in fields:
                fields.append(k)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    for r in flat:
        writer.writerow(r)
    out = Path(args.out) if args.out else None
    if out:
        out.with_suffix(".csv").write_text(buf.getvalue())
        out.with_suffix(".json").write_text(json.dumps(flat, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qres", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fixtures=True):
        if fixtures:
            p.add_argument("fixtures", nargs="+", help="FCIDUMP fixture paths")
        p.add_argument("--epsilon", type=float, default=1e-3, help="target accuracy (hartree)")
        p.add_argument("--shift", action="store_true", help="apply optimized symmetry shift")
        p.add_argument("--sector", default=None, help="symmetry sector, e.g. ne=4")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="append JSON-lines report here")
        p.add_argument("--dump-pauli", default=None, metavar="PATH",
                       help="write the qubit Hamiltonian as 'coeff paulistring' lines")
        p.add_argument("--large", action="store_true",
                       help="allow cells above %d qubits" % LARGE_QUBIT_LIMIT)

    p = sub.add_parser("partition", help="fragment statistics")
    common(p)
    p.add_argument("--method", required=True,
                   choices=["fc-si", "ac-si", "lr", "lr-f3", "lr-lcu"])
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("measure-cost", help="measurement counts")
    common(p)
    p.add_argument("--method", required=True, choices=["fc-si", "lr-f3"])
    p.set_defaults(func=cmd_measure_cost)

    p = sub.add_parser("trotter-cost", help="kappa_Q, descriptors, step count")
    common(p)
    p.add_argument("--method", required=True, choices=["fc-si", "lr-lcu"])
    p.add_argument("--p0", type=float, default=1.0)
    p.set_defaults(func=cmd_trotter_cost)

    p = sub.add_parser("lcu-cost", help="LCU 1-norms")
    common(p)
    p.add_argument("--method", required=True, choices=["ac-si", "lr"])
    p.set_defaults(func=cmd_lcu_cost)

    p = sub.add_parser("qcc", help="QCC/iQCC energies and overlaps")
    common(p)
    p.add_argument("--nent", default="10,20,50")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--iqcc-batch", type=int, default=10)
    p.set_defaults(func=cmd_qcc)

    p = sub.add_parser("exact", help="exact eigenpairs")
    common(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--dump-states", default=None, metavar="PATH")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("report", help="collate JSON-lines reports into tables")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default=None)
    p.set_defaults(func=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "report":
        return cmd_report(args)

    reports = []
    for fixture in args.fixtures:
        try:
            cell = Cell(Path(fixture), args.seed)
        except FileNotFoundError:
            print(json.dumps({"error": "missing fixture", "fixture": fixture}), file=sys.stderr)
            return EXIT_BAD_FIXTURE
        except QresError as exc:
            print(json.dumps({"error": str(exc), "fixture": fixture}), file=sys.stderr)
            return EXIT_BAD_FIXTURE
        if cell.n_qubits > LARGE_QUBIT_LIMIT and not args.large:
            print(json.dumps({"skipped": str(cell.path),
                              "reason": f"{cell.n_qubits} qubits; pass --large"}),
                  file=sys.stderr)
            continue
        if args.dump_pauli:
            Path(args.dump_pauli).write_text(cell.hq.to_lines() + "\n")
        try:
            reports.append(args.func(cell, args))
        except SolverError as exc:
            print(json.dumps({"error": str(exc), "fixture": fixture}), file=sys.stderr)
            return EXIT_SOLVER

    text = "\n".join(json.dumps(r, sort_keys=True) for r in reports)
    if args.out:
        with open(args.out, "a") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
