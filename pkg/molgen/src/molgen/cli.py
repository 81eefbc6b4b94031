"""Command-line entry point: emit FCIDUMP fixtures for the study geometries."""

from __future__ import annotations

import argparse
import json
import sys

from .generate import (
    FROZEN_CORES,
    REFERENCES,
    GeometrySpec,
    generate_to_directory,
    standard_specs,
)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="molgen", description=__doc__)
    ap.add_argument("--molecule", help="h2 | h4_chain | h4_rect | h2o | n2; omit for the full set")
    ap.add_argument("--r", type=float, help="bond length in angstrom")
    ap.add_argument("--reference", choices=["rhf", "uhf"], default=None)
    ap.add_argument("--frozen", type=int, default=None, help="frozen core orbital count")
    ap.add_argument("--out", default="fixtures", help="output directory")
    args = ap.parse_args(argv)

    if args.molecule is None:
        specs = standard_specs()
    else:
        if args.r is None:
            ap.error("--r is required with --molecule")
        ref = args.reference or REFERENCES.get(args.molecule, "rhf")
        frozen = args.frozen if args.frozen is not None else FROZEN_CORES.get(args.molecule, 0)
        specs = {
            f"{args.molecule}_{args.r:g}": GeometrySpec(args.molecule, args.r, ref, frozen)
        }

    records = generate_to_directory(specs, args.out)
    json.dump(records, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
